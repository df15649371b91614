// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sdg/rng.hpp"
#include "sdg/stats.hpp"
#include "sdg/verify.hpp"

using namespace sdg;

namespace {

int failures = 0;
int index = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    ++index;
    std::printf("[%2d/10] %s  %s (%s)\n", index, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

// 1. ordered data keep ordered solutions on randomized pairs
void criterion_comparison() {
    int violations = 0;
    double min_diff = 0.0;
    for (int i = 0; i < 200; ++i) {
        RandomInstancePair pair = make_random_instance_pair(90210, i);
        ConditionalExpectationEngine engine;
        engine.mode = EngineMode::TreeOracle;
        engine.gauss_order = 2 + (i % 2);
        ComparisonReport rep = comparison_check(pair.spec, pair.hi, pair.lo, pair.tgrid,
                                                constant_u(0), constant_v(0), engine, 1000 + i);
        if (!rep.hypotheses_met) {
            ++violations;
            continue;
        }
        min_diff = std::min(min_diff, rep.min_difference);
        if (rep.min_difference < -1e-10) ++violations;
    }
    report("comparison: 200 ordered pairs, no crossing below -1e-10", violations == 0,
           "violations=" + std::to_string(violations) + " min_diff=" + fmt(min_diff));
}

// 2. perturbation bound with beta = 2 + 2C + 4C^2 and slack 10 dt
void criterion_stability() {
    int failures_local = 0;
    for (int i = 0; i < 100; ++i) {
        RandomInstancePair pair = make_random_instance_pair(31415, i, false);
        pair.tgrid = TimeGrid(0.0, pair.spec.horizon, 3);
        double C = pair.spec.coefficients.lipschitz_C;
        double beta = 2.0 + 2.0 * C + 4.0 * C * C;
        double shift = 0.15 + 0.5 * (i % 7) / 7.0;
        ConditionalExpectationEngine engine;
        engine.mode = EngineMode::TreeOracle;
        engine.gauss_order = 2;
        StabilityReport rep = stability_check(
            pair.spec, pair.lo.terminal,
            [&](const Vec& x) { return pair.lo.terminal(x) + shift; },
            [i](double s) { return 0.3 * s - 0.1 * (i % 3); }, [](double s) { return 0.1 - 0.2 * s; },
            beta, pair.tgrid, constant_u(0), constant_v(0), engine);
        if (!rep.pass) ++failures_local;
    }
    report("stability: 100 randomized 3-step perturbation pairs", failures_local == 0,
           "failures=" + std::to_string(failures_local));
}

// 3. dynamic programming split identity: exact on trees, shrinking on grids
void criterion_dpp() {
    TreeParams params;
    params.gauss_order = 2;
    double worst_tree = 0.0;
    for (const char* name : {"separated_drift", "bilinear_gap"}) {
        ProblemSpec spec = make_scenario(name);
        double horizon = std::min(spec.horizon, 0.45);
        double lambda = spec.levy.total_rate();
        if (lambda > 0.0) horizon = std::min(horizon, 0.18 * 3 / lambda);
        TimeGrid tg(0.0, horizon, 3);
        for (int k_star = 1; k_star < 3; ++k_star) {
            worst_tree = std::max(worst_tree,
                                  dpp_check_tree(spec, GameSide::Lower, tg, k_star, params, {0.1}));
            worst_tree = std::max(worst_tree,
                                  dpp_check_tree(spec, GameSide::Upper, tg, k_star, params, {0.1}));
        }
    }
    bool grids_ok = true;
    std::string grid_note;
    for (const std::string& name : scenario_names()) {
        ProblemSpec spec = make_scenario(name);
        SchemeParams scheme;
        int steps = default_steps(spec, scheme);
        TimeGrid tg(0.0, spec.horizon, steps);
        StateGrid sg = default_state_grid(spec, scheme);
        ConditionalExpectationEngine engine;
        DppReport rep = dpp_check(spec, GameSide::Lower, tg, sg, steps / 2, engine, 3);
        if (!rep.ladder_nonincreasing) {
            grids_ok = false;
            grid_note += name + " ";
        }
    }
    report("dpp: tree exact at every split, grid ladder non-increasing",
           worst_tree <= 1e-12 && grids_ok,
           "tree_worst=" + fmt(worst_tree) + (grid_note.empty() ? "" : " bad: " + grid_note));
}

// 4. value regularity: stable space ratio, time exponent at least 0.45
void criterion_regularity() {
    bool pass = true;
    std::string note;
    for (const char* name : {"separated_drift", "jump_heavy"}) {
        ProblemSpec spec = make_scenario(name);
        SchemeParams scheme;
        TimeGrid tg(0.0, spec.horizon, default_steps(spec, scheme));
        StateGrid sg = default_state_grid(spec, scheme);
        ConditionalExpectationEngine engine;
        ValueField coarse = solve_value(spec, GameSide::Lower, tg, sg, engine);
        RegularityReport rc = regularity_check(coarse);
        TimeGrid tg2(0.0, spec.horizon, tg.n_steps * 2);
        StateGrid sg2 = StateGrid::uniform({scheme.x_lo}, {scheme.x_hi}, {scheme.x_nodes * 2 - 1});
        ValueField fine = solve_value(spec, GameSide::Lower, tg2, sg2, engine);
        RegularityReport rf = regularity_check(fine);
        double rel = std::fabs(rf.spatial_lipschitz - rc.spatial_lipschitz) /
                     std::max(1e-12, std::max(rc.spatial_lipschitz, rf.spatial_lipschitz));
        double alpha = std::min(rc.time_exponent, rf.time_exponent);
        if (rel > 0.10 || alpha < 0.45) pass = false;
        note += std::string(name) + ": lip_change=" + fmt(rel) + " alpha=" + fmt(alpha) + "  ";
    }
    report("regularity: Lipschitz ratio stable within 10%, exponent >= 0.45", pass, note);
}

// 5. pre-start rearrangement invariance with a working leak detector
void criterion_determinism() {
    ProblemSpec spec = make_scenario("separated_drift");
    DeterminismReport rep = determinism_check(spec, 0.4, {0.1}, 0.2, 10000, 2024);
    bool pass = rep.max_pathwise_delta == 0.0 && rep.mc_difference <= rep.mc_threshold &&
                rep.negative_control_delta > 0.0;
    report("determinism: exact swap invariance, MC agreement, leak detected", pass,
           "pathwise=" + fmt(rep.max_pathwise_delta) + " mc=" + fmt(rep.mc_difference) + "<=" +
               fmt(rep.mc_threshold) + " leak=" + fmt(rep.negative_control_delta));
}

// 6. minimax gap and value existence / strict-gap ordering
void criterion_isaacs() {
    SchemeParams scheme;
    ConditionalExpectationEngine engine;

    ProblemSpec sep = make_scenario("separated_drift");
    TimeGrid tg(0.0, sep.horizon, default_steps(sep, scheme));
    StateGrid sg = default_state_grid(sep, scheme);
    ValueField lower = solve_value(sep, GameSide::Lower, tg, sg, engine);
    ValueField upper = solve_value(sep, GameSide::Upper, tg, sg, engine);
    GapReport gap = isaacs_gap(sep, tg, sg, lower.values);
    double dist = 0.0;
    for (int k = 0; k <= tg.n_steps; ++k)
        for (long i = 0; i < sg.size(); ++i)
            dist = std::max(dist, std::fabs(upper.values[k][i] - lower.values[k][i]));

    ProblemSpec bil = make_scenario("bilinear_gap");
    TimeGrid tgb(0.0, bil.horizon, default_steps(bil, scheme));
    ValueField bl = solve_value(bil, GameSide::Lower, tgb, sg, engine);
    ValueField bu = solve_value(bil, GameSide::Upper, tgb, sg, engine);
    GapReport gap_bil = isaacs_gap(bil, tgb, sg, bl.values);
    double min_order = 0.0;
    for (int k = 0; k <= tgb.n_steps; ++k)
        for (long i = 0; i < sg.size(); ++i)
            min_order = std::min(min_order, bu.values[k][i] - bl.values[k][i]);

    bool pass = gap.max_gap <= 1e-12 && dist <= 1e-10 && gap_bil.max_gap > 1e-6 &&
                min_order >= -1e-10;
    report("isaacs: gap <= 1e-12 and |W - U| <= 1e-10 where separable; strict gap ordered", pass,
           "sep_gap=" + fmt(gap.max_gap) + " sep_dist=" + fmt(dist) + " bil_gap=" +
               fmt(gap_bil.max_gap) + " bil_order=" + fmt(min_order));
}

// 7. cross-solver distance at dx = 0.05 with one refinement halving
void criterion_cross_solver() {
    ProblemSpec spec = make_scenario("separated_drift");
    SchemeParams scheme;
    scheme.x_nodes = 81; // dx = 0.05 on [-2, 2]
    StateGrid sg = default_state_grid(spec, scheme);
    PideStepper probe(spec, GameSide::Lower, sg, 1e-6, 0.0, scheme.cfl_target);
    int n_steps = probe.required_steps(0.0, spec.horizon);
    TimeGrid tg(0.0, spec.horizon, n_steps);
    ConditionalExpectationEngine engine;
    PideSolution pide = solve_pide(spec, GameSide::Lower, tg, sg);
    ValueField game = solve_value(spec, GameSide::Lower, tg, sg, engine);
    double base = 0.0, base_t0 = 0.0;
    for (int k = 0; k <= tg.n_steps; ++k)
        for (long i = 0; i < sg.size(); ++i) {
            double d = std::fabs(pide.values[k][i] - game.values[k][i]);
            base = std::max(base, d);
            if (k == 0) base_t0 = std::max(base_t0, d);
        }
    StateGrid sg2 = StateGrid::uniform({scheme.x_lo}, {scheme.x_hi}, {161});
    PideStepper probe2(spec, GameSide::Lower, sg2, 1e-6, 0.0, scheme.cfl_target);
    TimeGrid tgp(0.0, spec.horizon, probe2.required_steps(0.0, spec.horizon));
    PideSolution pide2 = solve_pide(spec, GameSide::Lower, tgp, sg2);
    TimeGrid tgg(0.0, spec.horizon, n_steps * 2);
    ValueField game2 = solve_value(spec, GameSide::Lower, tgg, sg2, engine);
    double fine_t0 = 0.0;
    for (long i = 0; i < sg2.size(); ++i)
        fine_t0 = std::max(fine_t0, std::fabs(pide2.values[0][i] - game2.values[0][i]));
    bool pass = base <= 5e-2 && fine_t0 <= base_t0 + 1e-12;
    report("cross-solver: sup distance <= 5e-2 at dx = 0.05, shrinking when halved", pass,
           "base=" + fmt(base) + " refined_t0=" + fmt(fine_t0));
}

// 8. random initial states mix through the pointwise value on the tree
void criterion_markov() {
    ProblemSpec spec = make_scenario("driver_coupled");
    TimeGrid tg(0.0, 0.42, 3);
    ConditionalExpectationEngine engine;
    engine.mode = EngineMode::TreeOracle;
    engine.gauss_order = 2;
    MarkovReport rep = markov_identity_check(spec, {{0.4, {-0.3}}, {0.6, {0.5}}}, tg, constant_u(0),
                                             constant_v(0), engine, nullptr);
    report("markov identity: two-atom random start, tree mode <= 1e-12",
           rep.max_discrepancy <= 1e-12, "discrepancy=" + fmt(rep.max_discrepancy));
}

// 9. scheme soundness: monotone step, second-order Hamiltonian, conservation
void criterion_scheme() {
    ProblemSpec spec = make_scenario("jump_heavy");
    SchemeParams scheme;
    StateGrid sg = default_state_grid(spec, scheme);
    PideStepper probe(spec, GameSide::Lower, sg, 1e-6, 0.0, scheme.cfl_target);
    double dt = scheme.cfl_target / (probe.cfl_number() / 1e-6);
    PideStepper stepper(spec, GameSide::Lower, sg, dt, 0.0, scheme.cfl_target);
    const auto& mask = stepper.monotone_mask();
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        CounterRng rng(123 + trial, 0, 0, 5);
        Vec lo(sg.size()), hi(sg.size());
        for (long i = 0; i < sg.size(); ++i) {
            double x = sg.node(i)[0];
            lo[i] = std::cos(2.1 * x) * 0.7 + 0.3 * (rng.next_uniform() - 0.5);
            hi[i] = lo[i] + rng.next_uniform();
        }
        Vec slo = stepper.step(lo, 0.0);
        Vec shi = stepper.step(hi, 0.0);
        for (long i = 0; i < sg.size(); ++i)
            if (mask[i]) worst = std::max(worst, slo[i] - shi[i]);
    }

    // quadratic consistency of the central assembly under mesh halving
    ProblemSpec sep = make_scenario("separated_drift");
    const double qa = 0.7, qb = -0.4, qc = 0.2;
    std::vector<double> lx, ly;
    for (int r = 0; r < 4; ++r) {
        int n_nodes = 32 * (1 << r) + 1;
        StateGrid g = StateGrid::uniform({-2.0}, {2.0}, {n_nodes});
        Vec field(g.size());
        for (long i = 0; i < g.size(); ++i) {
            double x = g.node(i)[0];
            field[i] = qa * x * x + qb * x + qc;
        }
        int mid = n_nodes / 2;
        double x = g.axes[0][mid];
        const Vec& u = sep.u_set.at(0);
        const Vec& v = sep.v_set.at(0);
        HamiltonianEval ev = hamiltonian(sep, g, field, mid, 0.0, u, v);
        const auto& co = sep.coefficients;
        double dpsi = 2.0 * qa * x + qb;
        Mat sig = co.sigma(0.0, {x}, u, v);
        double exact = 0.5 * sig(0, 0) * sig(0, 0) * 2.0 * qa + dpsi * co.drift(0.0, {x}, u, v)[0];
        double c_nl = 0.0;
        for (const auto& atom : sep.levy.atoms) {
            double gamma = co.gamma(0.0, {x}, u, v, atom.mark)[0];
            exact += atom.rate * qa * gamma * gamma;
            c_nl += atom.rate * (dpsi * gamma + qa * gamma * gamma) * co.jump_weight({x}, atom.mark);
        }
        Vec z{dpsi * sig(0, 0)};
        exact += co.driver(0.0, {x}, qa * x * x + qb * x + qc, z, c_nl, u, v);
        double err = std::fabs(ev.total - exact);
        if (err > 1e-13) {
            lx.push_back(std::log(g.min_spacing()));
            ly.push_back(std::log(err));
        }
    }
    double order = 2.0;
    if (lx.size() >= 2) order = fit_line(lx, ly).slope;

    TreeParams params;
    params.gauss_order = 3;
    double mass = oracle_leaf_probability_sum(spec, TimeGrid(0.0, 0.12, 4), params);

    bool pass = worst <= 1e-12 && order >= 1.5 && order <= 2.6 && std::fabs(mass - 1.0) <= 1e-14;
    report("scheme soundness: monotone step, O(dx^2) Hamiltonian, conserved mass", pass,
           "monotone_viol=" + fmt(worst) + " order=" + fmt(order) + " mass_err=" +
               fmt(std::fabs(mass - 1.0)));
}

// 10. verify reruns with one seed produce byte-identical payloads
void criterion_reproducibility() {
    VerifyOptions options;
    options.problem = "separated_drift";
    options.seed = 7;
    options.comparison_trials = 20;
    options.stability_trials = 10;
    options.monotonicity_trials = 10;
    options.mc_paths = 1000;
    std::string a = run_verify(options).payload.dump();
    std::string b = run_verify(options).payload.dump();
    report("reproducibility: same-seed verify payloads byte-identical", a == b,
           "bytes=" + std::to_string(a.size()));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_comparison();
    criterion_stability();
    criterion_dpp();
    criterion_regularity();
    criterion_determinism();
    criterion_isaacs();
    criterion_cross_solver();
    criterion_markov();
    criterion_scheme();
    criterion_reproducibility();
    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
