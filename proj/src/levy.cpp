#include "sdg/levy.hpp"

#include <algorithm>
#include <cmath>

#include "sdg/rng.hpp"

namespace sdg {

void LevyMeasure::validate() const {
    for (const auto& a : atoms) {
        if (!(a.rate > 0.0)) throw ConfigError("LevyMeasure: atom rate must be > 0");
        if (norm2(a.mark) == 0.0) throw ConfigError("LevyMeasure: atom mark must be nonzero");
        if (a.mark.size() != atoms[0].mark.size())
            throw ConfigError("LevyMeasure: inconsistent mark dimensions");
    }
}

double compensator_integral(const LevyMeasure& measure, const std::function<double(const Vec&)>& h) {
    double s = 0.0;
    for (const auto& a : measure.atoms) s += a.rate * h(a.mark);
    return s;
}

bool PathBundle::operator==(const PathBundle& other) const {
    if (brownian_dim != other.brownian_dim || grid.n_steps != other.grid.n_steps) return false;
    if (grid.t0 != other.grid.t0 || grid.horizon != other.grid.horizon) return false;
    if (brownian_increments != other.brownian_increments) return false;
    if (jump_events.size() != other.jump_events.size()) return false;
    for (size_t k = 0; k < jump_events.size(); ++k) {
        if (jump_events[k].size() != other.jump_events[k].size()) return false;
        for (size_t j = 0; j < jump_events[k].size(); ++j) {
            if (jump_events[k][j].offset != other.jump_events[k][j].offset) return false;
            if (jump_events[k][j].atom != other.jump_events[k][j].atom) return false;
        }
    }
    return true;
}

namespace {
// RNG channels so every (path, step) pair draws from disjoint streams
constexpr uint64_t kChannelBrownian = 1;
constexpr uint64_t kChannelJumpCount = 2;
constexpr uint64_t kChannelJumpMark = 3;

PathBundle sample_one(const LevyMeasure& measure, const TimeGrid& grid, int d, uint64_t seed,
                      uint64_t path) {
    PathBundle b;
    b.grid = grid;
    b.brownian_dim = d;
    b.seed = seed;
    b.path_index = path;
    const int n = grid.n_steps;
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    const double total = measure.total_rate();
    b.brownian_increments.assign(n, Vec(d, 0.0));
    b.jump_events.assign(n, {});
    for (int k = 0; k < n; ++k) {
        CounterRng gauss(seed, path, static_cast<uint64_t>(k), kChannelBrownian);
        for (int j = 0; j < d; ++j) b.brownian_increments[k][j] = sqrt_dt * gauss.next_gaussian();
        if (total > 0.0) {
            CounterRng counts(seed, path, static_cast<uint64_t>(k), kChannelJumpCount);
            int n_jumps = counts.next_poisson(total * dt);
            if (n_jumps > 0) {
                CounterRng marks(seed, path, static_cast<uint64_t>(k), kChannelJumpMark);
                auto& events = b.jump_events[k];
                events.reserve(n_jumps);
                for (int j = 0; j < n_jumps; ++j) {
                    double u = marks.next_uniform() * total;
                    int atom = 0;
                    double acc = measure.atoms[0].rate;
                    while (u > acc && atom + 1 < static_cast<int>(measure.atoms.size())) {
                        ++atom;
                        acc += measure.atoms[atom].rate;
                    }
                    events.push_back({marks.next_uniform() * dt, atom});
                }
                std::sort(events.begin(), events.end(),
                          [](const JumpEvent& a, const JumpEvent& c) { return a.offset < c.offset; });
            }
        }
    }
    return b;
}
} // namespace

std::vector<PathBundle> sample_paths(const LevyMeasure& measure, const TimeGrid& grid, int brownian_dim,
                                     int n_paths, uint64_t seed) {
    if (n_paths < 1) throw ConfigError("sample_paths: n_paths must be >= 1");
    if (brownian_dim < 1) throw ConfigError("sample_paths: brownian_dim must be >= 1");
    measure.validate();
    std::vector<PathBundle> out(n_paths);
    parallel_for(n_paths, [&](int p) {
        out[p] = sample_one(measure, grid, brownian_dim, seed, static_cast<uint64_t>(p));
    });
    return out;
}

PathBundle segment_swap(const PathBundle& bundle, double t, double ell) {
    const TimeGrid& g = bundle.grid;
    const double dt = g.dt();
    if (!(ell > 0.0)) throw ConfigError("segment_swap: ell must be > 0");
    const double steps_f = ell / dt;
    const int m = static_cast<int>(std::llround(steps_f));
    if (m < 1 || std::fabs(steps_f - m) > 1e-9)
        throw ConfigError("segment_swap: ell must align with an integer number of grid steps");
    const double pos_f = (t - g.t0) / dt;
    const int kt = static_cast<int>(std::llround(pos_f));
    if (std::fabs(pos_f - kt) > 1e-9)
        throw ConfigError("segment_swap: t must align with a grid node");
    if (kt > g.n_steps) throw std::domain_error("segment_swap: t beyond the grid horizon");
    if (kt - 2 * m < 0) throw std::domain_error("segment_swap: grid does not reach t - 2*ell");

    PathBundle out = bundle;
    // steps [kt-2m, kt-m) and [kt-m, kt) trade places; offsets inside a step
    // are relative, so moving whole step payloads shifts every event by +-ell
    for (int j = 0; j < m; ++j) {
        std::swap(out.brownian_increments[kt - 2 * m + j], out.brownian_increments[kt - m + j]);
        std::swap(out.jump_events[kt - 2 * m + j], out.jump_events[kt - m + j]);
    }
    return out;
}

} // namespace sdg
