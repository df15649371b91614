#include "sdg/oracle.hpp"

#include <cmath>
#include <map>

namespace sdg {

namespace {

struct OracleContext {
    const ProblemSpec& spec;
    const TimeGrid& tgrid;
    const TreeParams& params;
    StepModel model;
    ConditionalExpectationEngine engine;
    long evals = 0;
    // exact-key cache: hits only on bit-identical repeated states, so the
    // recursion stays exact
    std::map<std::pair<int, Vec>, double> memo;

    OracleContext(const ProblemSpec& s, const TimeGrid& g, const TreeParams& p)
        : spec(s), tgrid(g), params(p), model(StepModel::build(s, g.dt(), p.gauss_order)) {
        engine.mode = EngineMode::TreeOracle;
        engine.gauss_order = p.gauss_order;
        engine.fixed_point_tol = p.fixed_point_tol;
        engine.max_fixed_point_iter = p.max_fixed_point_iter;
    }

    void charge() {
        if (++evals > params.max_evaluations)
            throw ConfigError("oracle: evaluation bound exceeded, estimated tree size > " +
                              std::to_string(params.max_evaluations) + " nodes");
    }
};

void guard_size(const ProblemSpec& spec, const TimeGrid& tgrid, const TreeParams& params,
                long per_node_factor) {
    long gauss_points = 1;
    for (int j = 0; j < spec.brownian_dim; ++j) gauss_points *= params.gauss_order;
    long branch = per_node_factor * (gauss_points * (spec.n_atoms() + 1) + spec.n_atoms() + 2);
    // recursion calls live strictly above the terminal layer
    double level = 1.0;
    double estimate = 1.0;
    for (int k = 0; k + 1 < tgrid.n_steps; ++k) {
        level *= static_cast<double>(branch);
        estimate += level;
        if (estimate > static_cast<double>(params.max_evaluations))
            throw ConfigError("oracle: refusing, estimated node count ~" + format_double(estimate) +
                              " exceeds bound " + std::to_string(params.max_evaluations));
    }
}

double value_rec(OracleContext& ctx, const UPolicy& u_policy, const VPolicy& v_policy,
                 const ScalarField& terminal, int k, const Vec& x) {
    if (k >= ctx.tgrid.n_steps) return terminal(x);
    auto key = std::make_pair(k, x);
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;
    ctx.charge();
    int iu = u_policy(k, x);
    int iv = v_policy(k, x, iu);
    ScalarField eta = [&](const Vec& xx) { return value_rec(ctx, u_policy, v_policy, terminal, k + 1, xx); };
    OneStepValue step = backward_step(ctx.spec, ctx.model, ctx.tgrid.time(k), x, ctx.spec.u_set.at(iu),
                                      ctx.spec.v_set.at(iv), eta, ctx.engine);
    ctx.memo.emplace(std::move(key), step.y);
    return step.y;
}

} // namespace

double oracle_bsde_value(const ProblemSpec& spec, const TimeGrid& tgrid, const UPolicy& u_policy,
                         const VPolicy& v_policy, const ScalarField& terminal, const TreeParams& params,
                         int depth, const Vec& x) {
    guard_size(spec, tgrid, params, 1);
    OracleContext ctx(spec, tgrid, params);
    return value_rec(ctx, u_policy, v_policy, terminal, depth, x);
}

double oracle_bsde_value_with(const ProblemSpec& spec, const BsdeInstance& inst, const TimeGrid& tgrid,
                              const UPolicy& u_policy, const VPolicy& v_policy, const TreeParams& params,
                              int depth, const Vec& x) {
    ProblemSpec local = spec;
    local.coefficients.driver = inst.driver;
    return oracle_bsde_value(local, tgrid, u_policy, v_policy, inst.terminal, params, depth, x);
}

OracleSolution oracle_bsde(const ProblemSpec& spec, const TimeGrid& tgrid, const UPolicy& u_policy,
                           const VPolicy& v_policy, const ScalarField& terminal, const TreeParams& params,
                           const Vec& x0, bool fill_table) {
    guard_size(spec, tgrid, params, 1);
    OracleContext ctx(spec, tgrid, params);
    const int n = tgrid.n_steps;

    OracleSolution sol;

    // realized outcome tree, breadth-first; every node gets its exact
    // (y, z, kbar) triple from the shared one-step rule
    std::vector<OracleNode> frontier;
    OracleNode root;
    root.depth = 0;
    root.state = x0;
    root.prob = 1.0;
    frontier.push_back(root);

    for (int k = 0; k <= n; ++k) {
        std::vector<OracleNode> next_frontier;
        for (OracleNode& node : frontier) {
            if (k == n) {
                node.y = terminal(node.state);
                node.z.assign(spec.brownian_dim, 0.0);
                node.k_atoms.assign(spec.n_atoms(), 0.0);
            } else {
                int iu = u_policy(k, node.state);
                int iv = v_policy(k, node.state, iu);
                ScalarField eta = [&](const Vec& xx) {
                    return value_rec(ctx, u_policy, v_policy, terminal, k + 1, xx);
                };
                OneStepValue step =
                    backward_step(spec, ctx.model, tgrid.time(k), node.state, spec.u_set.at(iu),
                                  spec.v_set.at(iv), eta, ctx.engine);
                node.y = step.y;
                node.z = step.z;
                node.kbar = step.kbar;
                node.k_atoms = step.k_atoms;
                if (fill_table || k == 0) {
                    for (const StepOutcome& o : ctx.model.outcomes) {
                        OracleNode child;
                        child.depth = k + 1;
                        child.state = ctx.model.advance(spec, tgrid.time(k), node.state,
                                                        spec.u_set.at(iu), spec.v_set.at(iv), o);
                        child.prob = node.prob * o.prob;
                        next_frontier.push_back(std::move(child));
                    }
                }
            }
            if (fill_table) sol.nodes.push_back(node);
            if (node.depth == 0) {
                sol.root_y = node.y;
                sol.root_z = node.z;
                sol.root_kbar = node.kbar;
            }
        }
        if (!fill_table && k == 0) break;
        frontier = std::move(next_frontier);
        if (frontier.empty()) break;
    }
    return sol;
}

OracleSolution oracle_bsde_with(const ProblemSpec& spec, const BsdeInstance& inst, const TimeGrid& tgrid,
                                const UPolicy& u_policy, const VPolicy& v_policy, const TreeParams& params,
                                const Vec& x0, bool fill_table) {
    ProblemSpec local = spec;
    local.coefficients.driver = inst.driver;
    return oracle_bsde(local, tgrid, u_policy, v_policy, inst.terminal, params, x0, fill_table);
}

json OracleSolution::tree_json(long max_nodes) const {
    json arr = json::array();
    long count = 0;
    for (const auto& node : nodes) {
        if (count++ >= max_nodes) break;
        arr.push_back({{"depth", node.depth},
                       {"state", node.state},
                       {"prob", node.prob},
                       {"y", node.y},
                       {"z", node.z},
                       {"kbar", node.kbar}});
    }
    return {{"n_nodes", static_cast<long>(nodes.size())}, {"nodes", arr}};
}

// ---------------------------------------------------------------------------
// game values
// ---------------------------------------------------------------------------

namespace {

struct GameContext {
    OracleContext base;
    GameSide side;
    const ScalarField& terminal;

    GameContext(const ProblemSpec& s, const TimeGrid& g, const TreeParams& p, GameSide side_,
                const ScalarField& term)
        : base(s, g, p), side(side_), terminal(term) {}
};

double game_rec(GameContext& ctx, int k, const Vec& x, int* best_u = nullptr, int* best_v = nullptr,
                std::vector<int>* reactions = nullptr);

double game_step_pair(GameContext& ctx, int k, const Vec& x, int iu, int iv) {
    const ProblemSpec& spec = ctx.base.spec;
    ScalarField eta = [&](const Vec& xx) { return game_rec(ctx, k + 1, xx); };
    OneStepValue step = backward_step(spec, ctx.base.model, ctx.base.tgrid.time(k), x, spec.u_set.at(iu),
                                      spec.v_set.at(iv), eta, ctx.base.engine);
    return step.y;
}

double game_rec(GameContext& ctx, int k, const Vec& x, int* best_u, int* best_v,
                std::vector<int>* reactions) {
    const ProblemSpec& spec = ctx.base.spec;
    if (k >= ctx.base.tgrid.n_steps) return ctx.terminal(x);
    bool want_selection = best_u != nullptr;
    if (!want_selection) {
        auto key = std::make_pair(k, x);
        auto it = ctx.base.memo.find(key);
        if (it != ctx.base.memo.end()) return it->second;
    }
    ctx.base.charge();

    const int nu = spec.u_set.size();
    const int nv = spec.v_set.size();
    double value;
    int sel_u = 0, sel_v = 0;
    std::vector<int> reaction_table;

    if (ctx.side == GameSide::Lower) {
        // adversary reacts to u within the step: inner min over v
        value = -std::numeric_limits<double>::infinity();
        for (int iu = 0; iu < nu; ++iu) {
            double inner = std::numeric_limits<double>::infinity();
            int inner_v = 0;
            for (int iv = 0; iv < nv; ++iv) {
                double y = game_step_pair(ctx, k, x, iu, iv);
                if (y < inner) {
                    inner = y;
                    inner_v = iv;
                }
            }
            reaction_table.push_back(inner_v);
            if (inner > value) {
                value = inner;
                sel_u = iu;
                sel_v = inner_v;
            }
        }
    } else {
        value = std::numeric_limits<double>::infinity();
        for (int iv = 0; iv < nv; ++iv) {
            double inner = -std::numeric_limits<double>::infinity();
            int inner_u = 0;
            for (int iu = 0; iu < nu; ++iu) {
                double y = game_step_pair(ctx, k, x, iu, iv);
                if (y > inner) {
                    inner = y;
                    inner_u = iu;
                }
            }
            reaction_table.push_back(inner_u);
            if (inner < value) {
                value = inner;
                sel_v = iv;
                sel_u = inner_u;
            }
        }
    }
    if (best_u) *best_u = sel_u;
    if (best_v) *best_v = sel_v;
    if (reactions) *reactions = reaction_table;
    if (!want_selection) ctx.base.memo.emplace(std::make_pair(k, x), value);
    return value;
}

} // namespace

double oracle_game_value(const ProblemSpec& spec, const TimeGrid& tgrid, GameSide side,
                         const TreeParams& params, int depth, const Vec& x) {
    return oracle_game_value_with_terminal(spec, tgrid, side, params, depth, x,
                                           spec.coefficients.terminal);
}

double oracle_game_value_with_terminal(const ProblemSpec& spec, const TimeGrid& tgrid, GameSide side,
                                       const TreeParams& params, int depth, const Vec& x,
                                       const ScalarField& terminal) {
    if (spec.u_set.size() * spec.v_set.size() > 100)
        throw ConfigError("oracle_game: control grid too large (|U| * |V| > 100)");
    guard_size(spec, tgrid, params, spec.u_set.size() * spec.v_set.size());
    GameContext ctx(spec, tgrid, params, side, terminal);
    return game_rec(ctx, depth, x);
}

OracleGameResult oracle_game(const ProblemSpec& spec, const TimeGrid& tgrid, GameSide side,
                             const TreeParams& params, const Vec& x0) {
    if (spec.u_set.size() * spec.v_set.size() > 100)
        throw ConfigError("oracle_game: control grid too large (|U| * |V| > 100)");
    guard_size(spec, tgrid, params, spec.u_set.size() * spec.v_set.size());
    const ScalarField terminal = spec.coefficients.terminal;
    GameContext ctx(spec, tgrid, params, side, terminal);
    OracleGameResult res;
    res.root_value = game_rec(ctx, 0, x0, &res.root_u, &res.root_v, &res.root_reactions);
    return res;
}

namespace {
double leaf_sum_rec(const StepModel& model, int depth, int n_steps, double prob, long& budget) {
    if (depth == n_steps) return prob;
    double s = 0.0;
    for (const StepOutcome& o : model.outcomes) {
        if (--budget < 0) throw ConfigError("oracle: leaf enumeration exceeds the evaluation bound");
        s += leaf_sum_rec(model, depth + 1, n_steps, prob * o.prob, budget);
    }
    return s;
}
} // namespace

double oracle_leaf_probability_sum(const ProblemSpec& spec, const TimeGrid& tgrid,
                                   const TreeParams& params) {
    StepModel model = StepModel::build(spec, tgrid.dt(), params.gauss_order);
    long budget = params.max_evaluations;
    return leaf_sum_rec(model, 0, tgrid.n_steps, 1.0, budget);
}

} // namespace sdg
