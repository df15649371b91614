#pragma once

#include <functional>

#include "sdg/problem.hpp"

namespace sdg {

// Feedback control: (step index, state) -> index into the player's control set.
using UPolicy = std::function<int(int, const Vec&)>;
// Step-local reaction: additionally sees the opponent's same-step choice.
using VPolicy = std::function<int(int, const Vec&, int)>;

inline UPolicy constant_u(int idx) {
    return [idx](int, const Vec&) { return idx; };
}
inline VPolicy constant_v(int idx) {
    return [idx](int, const Vec&, int) { return idx; };
}

struct ForwardTrajectory {
    TimeGrid grid;
    std::vector<Vec> states;  // [n_steps+1][n]
    std::vector<int> u_indices;
    std::vector<int> v_indices;
};

// One explicit Euler update with compensated jumps, coefficients frozen at
// the left endpoint. `jump_sum` is the summed jump coefficient over the
// step's events; the compensator term subtracts the rate-weighted mean so the
// jump contribution is a martingale increment.
Vec euler_update(const ProblemSpec& spec, double s, const Vec& x, const Vec& u, const Vec& v, double dt,
                 const Vec& brownian_increment, const std::vector<JumpEvent>& jumps);

ForwardTrajectory simulate(const ProblemSpec& spec, const PathBundle& bundle, const Vec& x0,
                           const UPolicy& u_policy, const VPolicy& v_policy, int start_step = 0);

struct MomentReport {
    double diff_ratio = 0.0;       // E[sup |X^x - X^x'|^2] / |x - x'|^2
    double growth_ratio = 0.0;     // E[sup |X|^2] / (1 + |x0|^2)
    double increment_ratio = 0.0;  // E[sup_{[t,t+dt]} |X - x0|^2] / (dt (1 + |x0|^2))
    std::vector<double> ladder_diff_ratios; // same ratio under dt halving
    bool bounded = true;
    json to_json() const;
};

MomentReport moment_check(const ProblemSpec& spec, const Vec& x0, const Vec& x0_alt, int n_paths,
                          int n_steps, uint64_t seed, int ladder_rungs = 3);

} // namespace sdg
