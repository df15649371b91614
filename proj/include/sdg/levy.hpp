#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sdg/common.hpp"
#include "sdg/grids.hpp"

namespace sdg {

// Finite-activity jump intensity: finitely many marks with positive rates.
struct LevyAtom {
    Vec mark;    // in R^l, nonzero
    double rate; // > 0
};

struct LevyMeasure {
    std::vector<LevyAtom> atoms;

    double total_rate() const {
        double s = 0.0;
        for (const auto& a : atoms) s += a.rate;
        return s;
    }
    int mark_dim() const { return atoms.empty() ? 1 : static_cast<int>(atoms[0].mark.size()); }
    void validate() const;
};

// sum_i rate_i * h(mark_i)
double compensator_integral(const LevyMeasure& measure, const std::function<double(const Vec&)>& h);

struct JumpEvent {
    double offset; // position inside the step, in (0, dt]
    int atom;      // index into measure.atoms
};

// One sampled realization of the driving noise on a time grid. Immutable
// after creation; identical (seed, path_index, grid, measure, d) gives a
// bit-identical bundle regardless of sampling order.
struct PathBundle {
    TimeGrid grid;
    int brownian_dim = 1;
    uint64_t seed = 0;
    uint64_t path_index = 0;
    std::vector<Vec> brownian_increments;             // [n_steps][d]
    std::vector<std::vector<JumpEvent>> jump_events;  // [n_steps]

    bool operator==(const PathBundle& other) const;
};

std::vector<PathBundle> sample_paths(const LevyMeasure& measure, const TimeGrid& grid, int brownian_dim,
                                     int n_paths, uint64_t seed);

// Exchanges the noise on (t-2l, t-l] and (t-l, t]; everything outside
// (t-2l, t] is untouched. Involution on the discretized representation.
PathBundle segment_swap(const PathBundle& bundle, double t, double ell);

} // namespace sdg
