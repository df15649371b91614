#include <doctest.h>

#include <cmath>

#include "sdg/game.hpp"

using namespace sdg;

namespace {

ConditionalExpectationEngine engine5() {
    ConditionalExpectationEngine e;
    e.gauss_order = 5;
    return e;
}

StateGrid grid1d(double lo, double hi, int n) { return StateGrid::uniform({lo}, {hi}, {n}); }

} // namespace

TEST_CASE("zero dynamics leave the terminal function untouched at every step") {
    ProblemSpec spec = make_scenario("zero_dynamics");
    TimeGrid tg(0.0, 1.0, 10);
    StateGrid sg = grid1d(-2.0, 2.0, 17);
    ValueField field = solve_value(spec, GameSide::Lower, tg, sg, engine5());
    for (int k = 0; k <= 10; ++k)
        for (long i = 0; i < sg.size(); ++i)
            CHECK(field.values[k][i] == doctest::Approx(sg.node(i)[0]).epsilon(1e-14));
}

TEST_CASE("one-step separated drift game is worth exactly the state") {
    // max-min over the 5x5 drift table is zero and the noise is centered
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid tg(0.0, 0.1, 1);
    StateGrid sg = grid1d(-2.0, 2.0, 41);
    ValueField field = solve_value(spec, GameSide::Lower, tg, sg, engine5());
    for (long i = 0; i < sg.size(); ++i)
        CHECK(field.values[0][i] == doctest::Approx(sg.node(i)[0]).epsilon(1e-13));
}

TEST_CASE("jointly additive drift keeps equal half-space values") {
    // b = u + v: both orders of optimization settle on the same zero-sum value
    ProblemSpec spec = make_scenario("separated_drift");
    json family = spec.coefficients.family;
    family["params"]["drift"]["Bv"] = json::array({json::array({1.0})});
    ProblemSpec joint = make_scenario("separated_drift");
    joint.coefficients.family = family;
    joint.coefficients.drift = [](double, const Vec&, const Vec& u, const Vec& v) {
        return Vec{u[0] + v[0]};
    };
    TreeParams params;
    params.gauss_order = 2;
    TimeGrid tg(0.0, 0.1, 1);
    double lower = oracle_game_value(joint, tg, GameSide::Lower, params, 0, {0.3});
    double upper = oracle_game_value(joint, tg, GameSide::Upper, params, 0, {0.3});
    CHECK(lower == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(upper == doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("lower field never exceeds the upper field") {
    for (const char* name : {"bilinear_gap", "jump_heavy"}) {
        ProblemSpec spec = make_scenario(name);
        TimeGrid tg(0.0, spec.horizon, name == std::string("jump_heavy") ? 25 : 10);
        StateGrid sg = grid1d(-2.0, 2.0, 21);
        ValueField lower = solve_value(spec, GameSide::Lower, tg, sg, engine5());
        ValueField upper = solve_value(spec, GameSide::Upper, tg, sg, engine5());
        for (int k = 0; k <= tg.n_steps; ++k)
            for (long i = 0; i < sg.size(); ++i)
                CHECK(upper.values[k][i] - lower.values[k][i] >= -1e-12);
    }
}

TEST_CASE("stored saddle selections replay to the stored value") {
    ProblemSpec spec = make_scenario("bilinear_gap");
    TimeGrid tg(0.0, 1.0, 8);
    StateGrid sg = grid1d(-2.0, 2.0, 17);
    ConditionalExpectationEngine engine = engine5();
    ValueField field = solve_value(spec, GameSide::Lower, tg, sg, engine);
    StepModel model = StepModel::build(spec, tg.dt(), engine.gauss_order);
    for (int k : {0, 4, 7}) {
        const Vec& next = field.values[k + 1];
        ScalarField eta = [&](const Vec& x) { return sg.interpolate(next, x); };
        for (long i = 0; i < sg.size(); i += 3) {
            int iu = field.u_sel[k][i];
            int iv = field.v_sel[k][i];
            double replay = backward_step(spec, model, tg.time(k), sg.node(i), spec.u_set.at(iu),
                                          spec.v_set.at(iv), eta, engine)
                                .y;
            CHECK(std::fabs(replay - field.values[k][i]) <= 1e-12);
        }
    }
}

TEST_CASE("raising the terminal raises the whole field") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid tg(0.0, 1.0, 10);
    StateGrid sg = grid1d(-2.0, 2.0, 21);
    ConditionalExpectationEngine engine = engine5();
    ValueField base = solve_value(spec, GameSide::Lower, tg, sg, engine);
    ScalarField lifted = [&](const Vec& x) { return spec.coefficients.terminal(x) + 0.5; };
    ValueField up = solve_value_with_terminal(spec, GameSide::Lower, tg, sg, engine, lifted);
    for (int k = 0; k <= 10; ++k)
        for (long i = 0; i < sg.size(); ++i)
            CHECK(up.values[k][i] - base.values[k][i] >= -1e-12);
}

TEST_CASE("split and recompose stays within interpolation error and refines away") {
    ProblemSpec spec = make_scenario("jump_heavy");
    TimeGrid tg(0.0, 1.0, 25);
    StateGrid sg = grid1d(-2.0, 2.0, 41);
    DppReport rep = dpp_check(spec, GameSide::Lower, tg, sg, 12, engine5(), 2);
    CHECK(rep.ladder.size() == 2);
    CHECK(rep.ladder_nonincreasing);
    CHECK(rep.discrepancy < 0.05);
}

TEST_CASE("split point validation and the degenerate split") {
    ProblemSpec spec = make_scenario("zero_dynamics");
    TimeGrid tg(0.0, 1.0, 8);
    StateGrid sg = grid1d(-1.0, 1.0, 9);
    CHECK_THROWS_AS(dpp_check(spec, GameSide::Lower, tg, sg, 0, engine5()), ConfigError);
    CHECK_THROWS_AS(dpp_check(spec, GameSide::Lower, tg, sg, 9, engine5()), ConfigError);
    // splitting at the horizon recomposes with the terminal datum itself
    CHECK(dpp_check(spec, GameSide::Lower, tg, sg, 8, engine5()).discrepancy == 0.0);
}

TEST_CASE("a constant driver makes the field linear in time with unit exponent") {
    ProblemSpec spec = make_scenario("zero_dynamics");
    const double c = 0.45;
    spec.coefficients.driver = [c](double, const Vec&, double, const Vec&, double, const Vec&,
                                   const Vec&) { return c; };
    spec.coefficients.family = json{};
    TimeGrid tg(0.0, 1.0, 16);
    StateGrid sg = grid1d(-2.0, 2.0, 41);
    ValueField field = solve_value(spec, GameSide::Lower, tg, sg, engine5());
    RegularityReport rep = regularity_check(field);
    CHECK_FALSE(rep.time_constant_field);
    CHECK(rep.time_exponent == doctest::Approx(1.0).epsilon(0.01));
    // |W(t,x) - W(t',x)| = c |t - t'| exactly
    CHECK(field.values[0][0] - field.values[16][0] == doctest::Approx(c).epsilon(1e-13));
}

TEST_CASE("zero dynamics report a unit spatial ratio and flag time constancy") {
    ProblemSpec spec = make_scenario("zero_dynamics");
    TimeGrid tg(0.0, 1.0, 10);
    StateGrid sg = grid1d(-2.0, 2.0, 41);
    ValueField field = solve_value(spec, GameSide::Lower, tg, sg, engine5());
    RegularityReport rep = regularity_check(field);
    CHECK(rep.time_constant_field);
    CHECK(rep.spatial_lipschitz == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.growth_ratio <= 1.0 + 1e-12);
}

TEST_CASE("regularity check enforces its grid preconditions") {
    ProblemSpec spec = make_scenario("zero_dynamics");
    StateGrid small = grid1d(-1.0, 1.0, 9);
    TimeGrid tg(0.0, 1.0, 10);
    ValueField field = solve_value(spec, GameSide::Lower, tg, small, engine5());
    CHECK_THROWS_AS(regularity_check(field), ConfigError);
}

TEST_CASE("swap-invariance of the pathwise cost with a leak detector") {
    ProblemSpec spec = make_scenario("separated_drift");
    DeterminismReport rep = determinism_check(spec, 0.4, {0.1}, 0.2, 4000, 99);
    CHECK(rep.max_pathwise_delta == 0.0);
    CHECK(rep.mc_difference <= rep.mc_threshold);
    CHECK(rep.control_sensitive);
    CHECK(rep.negative_control_delta > 0.0);
    CHECK(rep.pass);
}

TEST_CASE("the leak detector is vacuous when controls cannot move the cost") {
    ProblemSpec spec = make_scenario("zero_dynamics");
    DeterminismReport rep = determinism_check(spec, 0.4, {0.1}, 0.2, 2000, 31);
    CHECK(rep.max_pathwise_delta == 0.0);
    CHECK_FALSE(rep.control_sensitive);
    CHECK(rep.pass);
}

TEST_CASE("empty control sets are refused") {
    ProblemSpec spec = make_scenario("zero_dynamics");
    spec.u_set.points.clear();
    TimeGrid tg(0.0, 1.0, 4);
    StateGrid sg = grid1d(-1.0, 1.0, 9);
    CHECK_THROWS_AS(solve_value(spec, GameSide::Lower, tg, sg, engine5()), ConfigError);
}
