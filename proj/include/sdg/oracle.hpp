#pragma once

#include "sdg/bsde.hpp"

namespace sdg {

// Exact enumeration of the quadrature-discretized noise on tiny horizons.
// Shares StepModel/backward_step with the grid solvers, so any disagreement
// isolates interpolation or recursion bugs rather than modeling differences.
struct TreeParams {
    int gauss_order = 3;
    double fixed_point_tol = 1e-14;
    int max_fixed_point_iter = 200;
    long max_evaluations = 4'000'000;
};

struct OracleNode {
    int depth = 0;
    Vec state;
    double prob = 1.0;
    double y = 0.0;
    Vec z;
    double kbar = 0.0;
    Vec k_atoms;
};

struct OracleSolution {
    double root_y = 0.0;
    Vec root_z;
    double root_kbar = 0.0;
    std::vector<OracleNode> nodes; // realized outcome tree, breadth-first
    json tree_json(long max_nodes = 10'000) const;
};

// Exact value of the controlled backward recursion started at (depth, x).
double oracle_bsde_value(const ProblemSpec& spec, const TimeGrid& tgrid, const UPolicy& u_policy,
                         const VPolicy& v_policy, const ScalarField& terminal, const TreeParams& params,
                         int depth, const Vec& x);

// As above, with optional driver replacement (for the harnesses).
double oracle_bsde_value_with(const ProblemSpec& spec, const BsdeInstance& inst, const TimeGrid& tgrid,
                              const UPolicy& u_policy, const VPolicy& v_policy, const TreeParams& params,
                              int depth, const Vec& x);

OracleSolution oracle_bsde(const ProblemSpec& spec, const TimeGrid& tgrid, const UPolicy& u_policy,
                           const VPolicy& v_policy, const ScalarField& terminal, const TreeParams& params,
                           const Vec& x0, bool fill_table = true);

OracleSolution oracle_bsde_with(const ProblemSpec& spec, const BsdeInstance& inst, const TimeGrid& tgrid,
                                const UPolicy& u_policy, const VPolicy& v_policy, const TreeParams& params,
                                const Vec& x0, bool fill_table = true);

enum class GameSide { Lower, Upper };

struct OracleGameResult {
    double root_value = 0.0;
    int root_u = 0;
    int root_v = 0;
    std::vector<int> root_reactions; // best response per opposing choice at the root
};

double oracle_game_value(const ProblemSpec& spec, const TimeGrid& tgrid, GameSide side,
                         const TreeParams& params, int depth, const Vec& x);

// Game value with an arbitrary terminal datum (used by split/recompose checks).
double oracle_game_value_with_terminal(const ProblemSpec& spec, const TimeGrid& tgrid, GameSide side,
                                       const TreeParams& params, int depth, const Vec& x,
                                       const ScalarField& terminal);

OracleGameResult oracle_game(const ProblemSpec& spec, const TimeGrid& tgrid, GameSide side,
                             const TreeParams& params, const Vec& x0);

// Leaf-probability bookkeeping for the realized outcome tree.
double oracle_leaf_probability_sum(const ProblemSpec& spec, const TimeGrid& tgrid,
                                   const TreeParams& params);

} // namespace sdg
