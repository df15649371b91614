#include "sdg/forward.hpp"

#include <cmath>

#include "sdg/rng.hpp"

namespace sdg {

Vec euler_update(const ProblemSpec& spec, double s, const Vec& x, const Vec& u, const Vec& v, double dt,
                 const Vec& brownian_increment, const std::vector<JumpEvent>& jumps) {
    const auto& co = spec.coefficients;
    Vec next = x;
    axpy(dt, co.drift(s, x, u, v), next);
    Mat sig = co.sigma(s, x, u, v);
    for (int i = 0; i < sig.rows; ++i) {
        double acc = 0.0;
        for (int j = 0; j < sig.cols; ++j) acc += sig(i, j) * brownian_increment[j];
        next[i] += acc;
    }
    for (const JumpEvent& ev : jumps) axpy(1.0, co.gamma(s, x, u, v, spec.levy.atoms[ev.atom].mark), next);
    for (const auto& atom : spec.levy.atoms) axpy(-dt * atom.rate, co.gamma(s, x, u, v, atom.mark), next);
    return next;
}

ForwardTrajectory simulate(const ProblemSpec& spec, const PathBundle& bundle, const Vec& x0,
                           const UPolicy& u_policy, const VPolicy& v_policy, int start_step) {
    if (static_cast<int>(x0.size()) != spec.state_dim)
        throw ConfigError("simulate: x0 dimension != state_dim");
    if (bundle.brownian_dim != spec.brownian_dim)
        throw ConfigError("simulate: bundle Brownian dimension mismatch");
    const TimeGrid& g = bundle.grid;
    if (start_step < 0 || start_step >= g.n_steps) throw ConfigError("simulate: bad start_step");

    ForwardTrajectory traj;
    traj.grid = g.restrict_steps(start_step, g.n_steps);
    const int n = traj.grid.n_steps;
    traj.states.resize(n + 1);
    traj.u_indices.resize(n);
    traj.v_indices.resize(n);
    traj.states[0] = x0;
    const double dt = g.dt();
    for (int k = 0; k < n; ++k) {
        const int kk = start_step + k;
        const Vec& x = traj.states[k];
        int iu = u_policy(kk, x);
        int iv = v_policy(kk, x, iu);
        traj.u_indices[k] = iu;
        traj.v_indices[k] = iv;
        traj.states[k + 1] = euler_update(spec, g.time(kk), x, spec.u_set.at(iu), spec.v_set.at(iv), dt,
                                          bundle.brownian_increments[kk], bundle.jump_events[kk]);
        for (double c : traj.states[k + 1]) {
            if (!std::isfinite(c))
                throw NumericalError("simulate: non-finite state at step " + std::to_string(kk));
        }
    }
    return traj;
}

json MomentReport::to_json() const {
    return {{"diff_ratio", diff_ratio},
            {"growth_ratio", growth_ratio},
            {"increment_ratio", increment_ratio},
            {"ladder_diff_ratios", ladder_diff_ratios},
            {"bounded", bounded}};
}

namespace {

double sup_sq_deviation(const ForwardTrajectory& a, const ForwardTrajectory& b) {
    double worst = 0.0;
    for (size_t k = 0; k < a.states.size(); ++k) {
        double d = norm2(a.states[k] - b.states[k]);
        worst = std::max(worst, d * d);
    }
    return worst;
}

double run_diff_ratio(const ProblemSpec& spec, const Vec& x0, const Vec& x0_alt, int n_paths, int n_steps,
                      uint64_t seed) {
    TimeGrid grid(0.0, spec.horizon, n_steps);
    auto bundles = sample_paths(spec.levy, grid, spec.brownian_dim, n_paths, seed);
    double dx2 = norm2(x0 - x0_alt);
    dx2 *= dx2;
    double acc = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        CounterRng pol(seed, static_cast<uint64_t>(p), 0, 11);
        int iu = static_cast<int>(pol.next_uniform() * spec.u_set.size()) % spec.u_set.size();
        int iv = static_cast<int>(pol.next_uniform() * spec.v_set.size()) % spec.v_set.size();
        auto ta = simulate(spec, bundles[p], x0, constant_u(iu), constant_v(iv));
        auto tb = simulate(spec, bundles[p], x0_alt, constant_u(iu), constant_v(iv));
        acc += sup_sq_deviation(ta, tb);
    }
    return dx2 > 0.0 ? acc / n_paths / dx2 : 0.0;
}

} // namespace

MomentReport moment_check(const ProblemSpec& spec, const Vec& x0, const Vec& x0_alt, int n_paths,
                          int n_steps, uint64_t seed, int ladder_rungs) {
    if (n_paths < 1000) throw ConfigError("moment_check: need n_paths >= 1000");
    MomentReport rep;
    TimeGrid grid(0.0, spec.horizon, n_steps);
    const double dt = grid.dt();
    auto bundles = sample_paths(spec.levy, grid, spec.brownian_dim, n_paths, seed);

    double growth_acc = 0.0;
    double incr_acc = 0.0;
    double x0n2 = dot(x0, x0);
    for (int p = 0; p < n_paths; ++p) {
        CounterRng pol(seed, static_cast<uint64_t>(p), 0, 11);
        int iu = static_cast<int>(pol.next_uniform() * spec.u_set.size()) % spec.u_set.size();
        int iv = static_cast<int>(pol.next_uniform() * spec.v_set.size()) % spec.v_set.size();
        auto traj = simulate(spec, bundles[p], x0, constant_u(iu), constant_v(iv));
        double sup2 = 0.0;
        for (const Vec& x : traj.states) sup2 = std::max(sup2, dot(x, x));
        growth_acc += sup2;
        double d1 = norm2(traj.states[1] - x0);
        incr_acc += d1 * d1;
    }
    rep.growth_ratio = growth_acc / n_paths / (1.0 + x0n2);
    rep.increment_ratio = incr_acc / n_paths / (dt * (1.0 + x0n2));
    rep.diff_ratio = run_diff_ratio(spec, x0, x0_alt, n_paths, n_steps, seed);

    int steps = n_steps;
    for (int r = 0; r < ladder_rungs; ++r) {
        rep.ladder_diff_ratios.push_back(run_diff_ratio(spec, x0, x0_alt, n_paths, steps, seed + 1 + r));
        steps *= 2;
    }
    // flag unbounded growth across the ladder: each rung may wobble by MC
    // noise but should not blow up
    for (size_t r = 1; r < rep.ladder_diff_ratios.size(); ++r) {
        if (rep.ladder_diff_ratios[r] > 4.0 * rep.ladder_diff_ratios[0] + 1e-9) rep.bounded = false;
    }
    return rep;
}

} // namespace sdg
