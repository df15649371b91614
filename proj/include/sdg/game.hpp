#pragma once

#include "sdg/bsde.hpp"
#include "sdg/oracle.hpp"

namespace sdg {

// Value of the game on a time x state grid, with the per-node saddle
// selection of the step-local optimization.
struct ValueField {
    GameSide which = GameSide::Lower;
    TimeGrid tgrid;
    StateGrid sgrid;
    std::vector<Vec> values;              // [n_steps+1][nodes]
    std::vector<std::vector<int>> u_sel;  // [n_steps][nodes]
    std::vector<std::vector<int>> v_sel;  // [n_steps][nodes]

    double at(int step, const Vec& x) const { return sgrid.interpolate(values[step], x); }
};

// Backward recursion: final slice is the terminal function; each earlier
// slice applies max-min (lower) or min-max (upper) of the one-step block
// value over the finite control grids. Ties break to the lowest index.
ValueField solve_value(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                       const StateGrid& sgrid, const ConditionalExpectationEngine& engine);

// As solve_value but starting from an arbitrary terminal datum.
ValueField solve_value_with_terminal(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                                     const StateGrid& sgrid, const ConditionalExpectationEngine& engine,
                                     const ScalarField& terminal);

struct DppReport {
    double discrepancy = 0.0;              // sup over start-slice nodes
    std::vector<double> ladder;            // discrepancy under (dx, dt) halving
    bool ladder_nonincreasing = true;
    json to_json() const;
};

// Splits [t0, T] at step k_star: tail solve provides the terminal datum for
// the head solve; reports the sup-norm mismatch against the direct solve.
// Grid mode uses a half-cell staggered tail grid so the composition pays
// exactly one interpolation transfer.
DppReport dpp_check(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                    const StateGrid& sgrid, int k_star, const ConditionalExpectationEngine& engine,
                    int ladder_rungs = 0);

// Tree-mode split/recompose at a given depth; exact up to roundoff.
double dpp_check_tree(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid, int k_star,
                      const TreeParams& params, const Vec& x0);

struct RegularityReport {
    double spatial_lipschitz = 0.0;  // max |dW| / |dx| over adjacent nodes, all steps
    double time_exponent = 0.0;      // fitted alpha in |W(t,x)-W(t',x)| <= C (1+|x|) |t-t'|^alpha
    double time_constant_fit = 0.0;  // fitted C
    double growth_ratio = 0.0;       // max |W| / (1+|x|)
    bool time_constant_field = false;
    json to_json() const;
};

RegularityReport regularity_check(const ValueField& field);

struct DeterminismReport {
    double max_pathwise_delta = 0.0;     // cost shift under segment swap, fixed policies
    double mc_difference = 0.0;          // |Jhat_1 - Jhat_2| across disjoint pre-start histories
    double mc_threshold = 0.0;           // 3 combined standard errors
    double negative_control_delta = 0.0; // same swap check for a policy reading pre-start noise
    bool control_sensitive = true;       // false when controls cannot influence the cost
    bool pass = false;
    json to_json() const;
};

DeterminismReport determinism_check(const ProblemSpec& spec, double t, const Vec& x, double ell,
                                    int n_bundles, uint64_t seed);

} // namespace sdg
