#include "sdg/game.hpp"

#include <algorithm>
#include <cmath>

#include "sdg/rng.hpp"
#include "sdg/stats.hpp"

namespace sdg {

namespace {

struct StepChoice {
    double value;
    int u, v;
};

// step-local game over the finite control grids; ties to the lowest index
StepChoice optimize_step(const ProblemSpec& spec, const StepModel& model, double s, const Vec& x,
                         GameSide which, const ScalarField& eta,
                         const ConditionalExpectationEngine& engine) {
    const int nu = spec.u_set.size();
    const int nv = spec.v_set.size();
    StepChoice best{0.0, 0, 0};
    if (which == GameSide::Lower) {
        bool first_u = true;
        for (int iu = 0; iu < nu; ++iu) {
            double inner = 0.0;
            int inner_v = 0;
            bool first_v = true;
            for (int iv = 0; iv < nv; ++iv) {
                double y = backward_step(spec, model, s, x, spec.u_set.at(iu), spec.v_set.at(iv), eta,
                                         engine)
                               .y;
                if (first_v || y < inner) {
                    inner = y;
                    inner_v = iv;
                    first_v = false;
                }
            }
            if (first_u || inner > best.value) {
                best = {inner, iu, inner_v};
                first_u = false;
            }
        }
    } else {
        bool first_v = true;
        for (int iv = 0; iv < nv; ++iv) {
            double inner = 0.0;
            int inner_u = 0;
            bool first_u = true;
            for (int iu = 0; iu < nu; ++iu) {
                double y = backward_step(spec, model, s, x, spec.u_set.at(iu), spec.v_set.at(iv), eta,
                                         engine)
                               .y;
                if (first_u || y > inner) {
                    inner = y;
                    inner_u = iu;
                    first_u = false;
                }
            }
            if (first_v || inner < best.value) {
                best = {inner, inner_u, iv};
                first_v = false;
            }
        }
    }
    return best;
}

} // namespace

ValueField solve_value_with_terminal(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                                     const StateGrid& sgrid, const ConditionalExpectationEngine& engine,
                                     const ScalarField& terminal) {
    if (spec.u_set.size() == 0 || spec.v_set.size() == 0)
        throw ConfigError("solve_value: empty control set");
    if (tgrid.dt() * spec.coefficients.lipschitz_C >= 1.0)
        throw ConfigError("solve_value: dt * C >= 1, refuse");
    const int n = tgrid.n_steps;
    const long nodes = sgrid.size();
    ValueField field;
    field.which = which;
    field.tgrid = tgrid;
    field.sgrid = sgrid;
    field.values.assign(n + 1, Vec(nodes, 0.0));
    field.u_sel.assign(n, std::vector<int>(nodes, 0));
    field.v_sel.assign(n, std::vector<int>(nodes, 0));

    for (long i = 0; i < nodes; ++i) field.values[n][i] = terminal(sgrid.node(i));

    StepModel model = StepModel::build(spec, tgrid.dt(), engine.gauss_order);
    for (int k = n - 1; k >= 0; --k) {
        const Vec& next = field.values[k + 1];
        ScalarField eta = [&](const Vec& x) { return sgrid.interpolate(next, x); };
        parallel_for(static_cast<int>(nodes), [&](int i) {
            StepChoice c = optimize_step(spec, model, tgrid.time(k), sgrid.node(i), which, eta, engine);
            field.values[k][i] = c.value;
            field.u_sel[k][i] = c.u;
            field.v_sel[k][i] = c.v;
        });
    }
    return field;
}

ValueField solve_value(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                       const StateGrid& sgrid, const ConditionalExpectationEngine& engine) {
    return solve_value_with_terminal(spec, which, tgrid, sgrid, engine, spec.coefficients.terminal);
}

// ---------------------------------------------------------------------------
// dynamic programming split checks
// ---------------------------------------------------------------------------

json DppReport::to_json() const {
    return {{"discrepancy", discrepancy},
            {"ladder", ladder},
            {"ladder_nonincreasing", ladder_nonincreasing}};
}

namespace {

StateGrid staggered(const StateGrid& sgrid) {
    std::vector<Vec> axes = sgrid.axes;
    for (Vec& ax : axes) {
        double h = ax[1] - ax[0];
        for (double& v : ax) v += 0.5 * h;
    }
    return StateGrid(std::move(axes));
}

double dpp_once(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid, const StateGrid& sgrid,
                int k_star, const ConditionalExpectationEngine& engine) {
    ValueField direct = solve_value(spec, which, tgrid, sgrid, engine);

    // tail on a staggered grid, head re-reads it through interpolation
    StateGrid tail_grid = staggered(sgrid);
    TimeGrid tail = tgrid.restrict_steps(k_star, tgrid.n_steps);
    ValueField tail_field = solve_value(spec, which, tail, tail_grid, engine);

    TimeGrid head = tgrid.restrict_steps(0, k_star);
    ScalarField mid = [&](const Vec& x) { return tail_grid.interpolate(tail_field.values[0], x); };
    ValueField head_field = solve_value_with_terminal(spec, which, head, sgrid, engine, mid);

    double sup = 0.0;
    for (long i = 0; i < sgrid.size(); ++i)
        sup = std::max(sup, std::fabs(head_field.values[0][i] - direct.values[0][i]));
    return sup;
}

} // namespace

DppReport dpp_check(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                    const StateGrid& sgrid, int k_star, const ConditionalExpectationEngine& engine,
                    int ladder_rungs) {
    if (k_star <= 0 || k_star > tgrid.n_steps)
        throw ConfigError("dpp_check: split step out of range");
    if (k_star == tgrid.n_steps) {
        // degenerate split: the tail is the terminal datum itself
        DppReport rep;
        rep.discrepancy = 0.0;
        return rep;
    }
    DppReport rep;
    rep.discrepancy = dpp_once(spec, which, tgrid, sgrid, k_star, engine);
    TimeGrid tg = tgrid;
    StateGrid sg = sgrid;
    int split = k_star;
    for (int r = 0; r < ladder_rungs; ++r) {
        rep.ladder.push_back(r == 0 ? rep.discrepancy : dpp_once(spec, which, tg, sg, split, engine));
        if (r + 1 < ladder_rungs) {
            tg = TimeGrid(tg.t0, tg.horizon, tg.n_steps * 2);
            split *= 2;
            std::vector<int> counts;
            Vec lo, hi;
            for (const Vec& ax : sg.axes) {
                counts.push_back(static_cast<int>(ax.size()) * 2 - 1);
                lo.push_back(ax.front());
                hi.push_back(ax.back());
            }
            sg = StateGrid::uniform(lo, hi, counts);
        }
    }
    for (size_t r = 1; r < rep.ladder.size(); ++r)
        if (rep.ladder[r] > rep.ladder[r - 1] + 1e-12) rep.ladder_nonincreasing = false;
    return rep;
}

double dpp_check_tree(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid, int k_star,
                      const TreeParams& params, const Vec& x0) {
    if (k_star <= 0 || k_star >= tgrid.n_steps)
        throw ConfigError("dpp_check_tree: split step must be interior");
    double direct = oracle_game_value(spec, tgrid, which, params, 0, x0);
    ScalarField mid = [&](const Vec& x) {
        return oracle_game_value(spec, tgrid, which, params, k_star, x);
    };
    TimeGrid head = tgrid.restrict_steps(0, k_star);
    // head solve consumes the tail value as its terminal datum; indices in
    // the head recursion run 0..k_star with the same dt
    double composed = oracle_game_value_with_terminal(spec, head, which, params, 0, x0, mid);
    return std::fabs(direct - composed);
}

// ---------------------------------------------------------------------------
// regularity
// ---------------------------------------------------------------------------

json RegularityReport::to_json() const {
    return {{"spatial_lipschitz", spatial_lipschitz},
            {"time_exponent", time_exponent},
            {"time_constant_fit", time_constant_fit},
            {"growth_ratio", growth_ratio},
            {"time_constant_field", time_constant_field}};
}

RegularityReport regularity_check(const ValueField& field) {
    const TimeGrid& tg = field.tgrid;
    const StateGrid& sg = field.sgrid;
    if (tg.n_steps < 8) throw ConfigError("regularity_check: need >= 8 time steps");
    if (sg.size() < 33) throw ConfigError("regularity_check: need >= 33 space nodes");

    RegularityReport rep;
    const int n = tg.n_steps;
    const long nodes = sg.size();

    // (i) spatial difference ratios over axis-adjacent nodes
    for (int k = 0; k <= n; ++k) {
        for (long i = 0; i < nodes; ++i) {
            std::vector<int> idx = sg.unflatten(i);
            for (int d = 0; d < sg.dim(); ++d) {
                if (idx[d] + 1 >= static_cast<int>(sg.axes[d].size())) continue;
                std::vector<int> jdx = idx;
                ++jdx[d];
                long j = sg.flat_index(jdx);
                double dx = sg.axes[d][jdx[d]] - sg.axes[d][idx[d]];
                rep.spatial_lipschitz =
                    std::max(rep.spatial_lipschitz, std::fabs(field.values[k][j] - field.values[k][i]) / dx);
            }
        }
    }

    // (iii) growth
    double max_w = 0.0;
    for (int k = 0; k <= n; ++k) {
        for (long i = 0; i < nodes; ++i) {
            double g = std::fabs(field.values[k][i]) / (1.0 + norm2(sg.node(i)));
            rep.growth_ratio = std::max(rep.growth_ratio, g);
            max_w = std::max(max_w, std::fabs(field.values[k][i]));
        }
    }

    // (ii) time exponent: normalized sup differences over step pairs
    std::vector<double> log_dt, log_diff;
    for (int k = 0; k <= n; ++k) {
        for (int j = k + 1; j <= n; ++j) {
            double sup = 0.0;
            for (long i = 0; i < nodes; ++i) {
                double norm = 1.0 + norm2(sg.node(i));
                sup = std::max(sup, std::fabs(field.values[k][i] - field.values[j][i]) / norm);
            }
            if (sup > 1e-10 * (1.0 + max_w)) {
                log_dt.push_back(std::log(tg.time(j) - tg.time(k)));
                log_diff.push_back(std::log(sup));
            }
        }
    }
    if (log_dt.size() < 4) {
        // constant-in-t field: the bound holds with C = 0, report exponent 1
        rep.time_constant_field = true;
        rep.time_exponent = 1.0;
        rep.time_constant_fit = 0.0;
    } else {
        LineFit fit = fit_line(log_dt, log_diff);
        rep.time_exponent = fit.slope;
        rep.time_constant_fit = std::exp(fit.intercept);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// statistical determinism across pre-start histories
// ---------------------------------------------------------------------------

json DeterminismReport::to_json() const {
    return {{"max_pathwise_delta", max_pathwise_delta},
            {"mc_difference", mc_difference},
            {"mc_threshold", mc_threshold},
            {"negative_control_delta", negative_control_delta},
            {"control_sensitive", control_sensitive},
            {"pass", pass}};
}

namespace {

// Pathwise cost estimator: deterministic functional of the post-start path
// segment and the policies (terminal plus the left-endpoint driver sum).
double path_cost(const ProblemSpec& spec, const ForwardTrajectory& traj) {
    const auto& co = spec.coefficients;
    const int n = traj.grid.n_steps;
    const double dt = traj.grid.dt();
    double y = co.terminal(traj.states[n]);
    Vec z0(spec.brownian_dim, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        y += dt * co.driver(traj.grid.time(k), traj.states[k], y, z0, 0.0,
                            spec.u_set.at(traj.u_indices[k]), spec.v_set.at(traj.v_indices[k]));
    }
    return y;
}

// Sum over the first half of the pre-start window only: the segment swap
// exchanges the two halves, so this statistic is swap-sensitive while the
// full-window sum would not be.
double pre_start_half_sum(const PathBundle& bundle, int half_steps) {
    double s = 0.0;
    for (int k = 0; k < half_steps; ++k)
        for (double c : bundle.brownian_increments[k]) s += c;
    return s;
}

} // namespace

DeterminismReport determinism_check(const ProblemSpec& spec, double t, const Vec& x, double ell,
                                    int n_bundles, uint64_t seed) {
    DeterminismReport rep;
    const int steps_per_ell = 4;
    const double dt = ell / steps_per_ell;
    const int pre_steps = 2 * steps_per_ell;
    const int post_steps = std::max(1, static_cast<int>(std::lround((spec.horizon - t) / dt)));
    TimeGrid grid(t - 2 * ell, t - 2 * ell + dt * (pre_steps + post_steps), pre_steps + post_steps);

    auto bundles = sample_paths(spec.levy, grid, spec.brownian_dim, n_bundles, seed);

    UPolicy feed_u = [&](int, const Vec& xx) { return xx[0] >= 0.0 ? 0 : spec.u_set.size() - 1; };
    VPolicy feed_v = [&](int, const Vec& xx, int) { return xx[0] >= 0.0 ? spec.v_set.size() - 1 : 0; };

    // (i) pathwise invariance for feedback policies
    std::vector<double> costs(n_bundles);
    for (int p = 0; p < n_bundles; ++p) {
        auto traj = simulate(spec, bundles[p], x, feed_u, feed_v, pre_steps);
        costs[p] = path_cost(spec, traj);
        PathBundle swapped = segment_swap(bundles[p], t, ell);
        auto traj2 = simulate(spec, swapped, x, feed_u, feed_v, pre_steps);
        rep.max_pathwise_delta =
            std::max(rep.max_pathwise_delta, std::fabs(costs[p] - path_cost(spec, traj2)));
    }

    // (ii) disjoint pre-start histories: independent seeds, same estimator
    auto bundles2 = sample_paths(spec.levy, grid, spec.brownian_dim, n_bundles, seed + 777);
    std::vector<double> costs2(n_bundles);
    for (int p = 0; p < n_bundles; ++p) {
        auto traj = simulate(spec, bundles2[p], x, feed_u, feed_v, pre_steps);
        costs2[p] = path_cost(spec, traj);
    }
    SampleStats s1 = sample_stats(costs);
    SampleStats s2 = sample_stats(costs2);
    rep.mc_difference = std::fabs(s1.mean - s2.mean);
    rep.mc_threshold = 3.0 * std::sqrt(s1.std_error * s1.std_error + s2.std_error * s2.std_error);

    // negative control: a policy that reads pre-start noise must be caught
    for (int p = 0; p < n_bundles && rep.negative_control_delta == 0.0; ++p) {
        const PathBundle& b = bundles[p];
        UPolicy leaky_u = [&](int, const Vec&) {
            return pre_start_half_sum(b, steps_per_ell) >= 0.0 ? 0 : spec.u_set.size() - 1;
        };
        PathBundle swapped = segment_swap(b, t, ell);
        UPolicy leaky_u2 = [&](int, const Vec&) {
            return pre_start_half_sum(swapped, steps_per_ell) >= 0.0 ? 0 : spec.u_set.size() - 1;
        };
        auto traj = simulate(spec, b, x, leaky_u, feed_v, pre_steps);
        auto traj2 = simulate(spec, swapped, x, leaky_u2, feed_v, pre_steps);
        rep.negative_control_delta = std::fabs(path_cost(spec, traj) - path_cost(spec, traj2));
    }

    // the negative control has no power when controls cannot move the cost
    {
        const auto& co = spec.coefficients;
        Vec xx(spec.state_dim, 0.3);
        const Vec& u0 = spec.u_set.at(0);
        const Vec& u1 = spec.u_set.at(spec.u_set.size() - 1);
        const Vec& v0 = spec.v_set.at(0);
        double diff = norm2(co.drift(0.0, xx, u0, v0) - co.drift(0.0, xx, u1, v0));
        Mat s0 = co.sigma(0.0, xx, u0, v0), s1 = co.sigma(0.0, xx, u1, v0);
        for (size_t q = 0; q < s0.a.size(); ++q) diff += std::fabs(s0.a[q] - s1.a[q]);
        for (const auto& atom : spec.levy.atoms)
            diff += norm2(co.gamma(0.0, xx, u0, v0, atom.mark) - co.gamma(0.0, xx, u1, v0, atom.mark));
        Vec z0(spec.brownian_dim, 0.0);
        diff += std::fabs(co.driver(0.0, xx, 0.2, z0, 0.1, u0, v0) -
                          co.driver(0.0, xx, 0.2, z0, 0.1, u1, v0));
        rep.control_sensitive = diff > 1e-14;
    }
    rep.pass = rep.max_pathwise_delta == 0.0 && rep.mc_difference <= rep.mc_threshold &&
               (rep.negative_control_delta > 0.0 || !rep.control_sensitive);
    return rep;
}

} // namespace sdg
