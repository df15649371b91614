#include <doctest.h>

#include <cmath>

#include "sdg/game.hpp"

using namespace sdg;

namespace {

ProblemSpec zero_dynamics_spec() {
    ProblemSpec spec = make_scenario("zero_dynamics");
    return spec;
}

} // namespace

TEST_CASE("frozen dynamics return the terminal value at the root") {
    ProblemSpec spec = zero_dynamics_spec();
    TimeGrid tg(0.0, 1.0, 4);
    TreeParams params;
    OracleSolution sol = oracle_bsde(spec, tg, constant_u(0), constant_v(0),
                                     spec.coefficients.terminal, params, {0.6}, false);
    CHECK(sol.root_y == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("a constant driver adds horizon times the constant, exactly") {
    ProblemSpec spec = make_scenario("separated_drift");
    const double c = 0.3;
    spec.coefficients.driver = [c](double, const Vec&, double, const Vec&, double, const Vec&,
                                   const Vec&) { return c; };
    spec.coefficients.family = json{};
    TimeGrid tg(0.0, 0.4, 3);
    TreeParams params;
    params.gauss_order = 2;
    // linear terminal plus martingale dynamics: E[Phi(X_T)] = Phi(x0)
    OracleSolution sol = oracle_bsde(spec, tg, constant_u(2), constant_v(2),
                                     spec.coefficients.terminal, params, {0.5}, false);
    CHECK(sol.root_y == doctest::Approx(0.5 + c * 0.4).epsilon(1e-13));
}

TEST_CASE("leaf probabilities conserve mass") {
    ProblemSpec spec = make_scenario("jump_heavy");
    TimeGrid tg(0.0, 0.12, 4);
    TreeParams params;
    params.gauss_order = 3;
    double mass = oracle_leaf_probability_sum(spec, tg, params);
    CHECK(std::fabs(mass - 1.0) <= 1e-14);
}

TEST_CASE("the realized node table carries consistent probabilities and values") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid tg(0.0, 0.3, 2);
    TreeParams params;
    params.gauss_order = 2;
    OracleSolution sol = oracle_bsde(spec, tg, constant_u(1), constant_v(3),
                                     spec.coefficients.terminal, params, {0.0}, true);
    double depth_mass[3] = {0.0, 0.0, 0.0};
    for (const auto& node : sol.nodes) {
        REQUIRE(node.depth >= 0);
        REQUIRE(node.depth <= 2);
        depth_mass[node.depth] += node.prob;
        CHECK(std::isfinite(node.y));
    }
    for (double mass : depth_mass) CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    json dump = sol.tree_json(100);
    CHECK(dump["n_nodes"].get<long>() == static_cast<long>(sol.nodes.size()));
}

TEST_CASE("game value with one control point each collapses to the plain solve") {
    ProblemSpec spec = make_scenario("separated_drift");
    spec.u_set.points = {{0.5}};
    spec.v_set.points = {{-0.5}};
    TimeGrid tg(0.0, 0.3, 2);
    TreeParams params;
    params.gauss_order = 3;
    OracleGameResult game = oracle_game(spec, tg, GameSide::Lower, params, {0.2});
    OracleSolution plain = oracle_bsde(spec, tg, constant_u(0), constant_v(0),
                                       spec.coefficients.terminal, params, {0.2}, false);
    CHECK(game.root_value == doctest::Approx(plain.root_y).epsilon(1e-14));
    CHECK(game.root_u == 0);
    CHECK(game.root_v == 0);
}

TEST_CASE("separated drift game has equal half-space values on the tree") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid tg(0.0, 0.3, 2);
    TreeParams params;
    params.gauss_order = 2;
    double lower = oracle_game_value(spec, tg, GameSide::Lower, params, 0, {0.4});
    double upper = oracle_game_value(spec, tg, GameSide::Upper, params, 0, {0.4});
    CHECK(std::fabs(lower - upper) <= 1e-12);
    // drift game value max-min (u - v) = 0, linear terminal: root = x0
    CHECK(lower == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("bilinear drift game keeps a strict gap between the half-space values") {
    ProblemSpec spec = make_scenario("bilinear_gap");
    TimeGrid tg(0.0, 0.3, 2);
    TreeParams params;
    params.gauss_order = 2;
    double lower = oracle_game_value(spec, tg, GameSide::Lower, params, 0, {0.0});
    double upper = oracle_game_value(spec, tg, GameSide::Upper, params, 0, {0.0});
    CHECK(upper - lower > 0.1); // u.v saddle gap accumulates at rate 2 per unit time
    CHECK(lower < upper);
}

TEST_CASE("splitting and recomposing the game recursion is exact at every depth") {
    ProblemSpec spec = make_scenario("bilinear_gap");
    TimeGrid tg(0.0, 0.3, 3);
    TreeParams params;
    params.gauss_order = 2;
    for (int k_star = 1; k_star < 3; ++k_star) {
        CHECK(dpp_check_tree(spec, GameSide::Lower, tg, k_star, params, {0.1}) <= 1e-14);
        CHECK(dpp_check_tree(spec, GameSide::Upper, tg, k_star, params, {0.1}) <= 1e-14);
    }
}

TEST_CASE("the root reaction table replays to the stored value") {
    ProblemSpec spec = make_scenario("bilinear_gap");
    TimeGrid tg(0.0, 0.3, 2);
    TreeParams params;
    params.gauss_order = 2;
    OracleGameResult res = oracle_game(spec, tg, GameSide::Lower, params, {0.25});
    REQUIRE(res.root_reactions.size() == static_cast<size_t>(spec.u_set.size()));
    CHECK(res.root_reactions[res.root_u] == res.root_v);
}

TEST_CASE("oversized trees are refused with an estimate") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid tg(0.0, 1.0, 12);
    TreeParams params;
    params.gauss_order = 3;
    params.max_evaluations = 10000;
    CHECK_THROWS_AS(
        oracle_bsde(spec, tg, constant_u(0), constant_v(0), spec.coefficients.terminal, params,
                    {0.0}, false),
        ConfigError);
    spec.u_set = ControlSet::grid({-1.0}, {1.0}, {11}, "U");
    spec.v_set = ControlSet::grid({-1.0}, {1.0}, {11}, "V");
    CHECK_THROWS_AS(oracle_game(spec, TimeGrid(0.0, 0.3, 2), GameSide::Lower, params, {0.0}),
                    ConfigError);
}
