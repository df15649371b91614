#include <doctest.h>

#include <cmath>

#include "sdg/forward.hpp"
#include "sdg/stats.hpp"

using namespace sdg;

namespace {

ProblemSpec callable_spec(double b, double sigma, double gamma_scale, LevyMeasure levy) {
    ProblemSpec spec;
    spec.name = "callable";
    spec.state_dim = 1;
    spec.brownian_dim = 1;
    spec.horizon = 1.0;
    spec.levy = std::move(levy);
    spec.u_set.label = "U";
    spec.u_set.points = {{0.0}};
    spec.v_set.label = "V";
    spec.v_set.points = {{0.0}};
    auto& co = spec.coefficients;
    co.lipschitz_C = 1.0;
    co.drift = [b](double, const Vec&, const Vec&, const Vec&) { return Vec{b}; };
    co.sigma = [sigma](double, const Vec&, const Vec&, const Vec&) {
        Mat m(1, 1);
        m(0, 0) = sigma;
        return m;
    };
    co.gamma = [gamma_scale](double, const Vec&, const Vec&, const Vec&, const Vec& e) {
        return Vec{gamma_scale * e[0]};
    };
    co.driver = [](double, const Vec&, double, const Vec&, double, const Vec&, const Vec&) {
        return 0.0;
    };
    co.terminal = [](const Vec& x) { return x[0]; };
    co.jump_weight = [](const Vec&, const Vec& e) { return std::min(1.0, std::fabs(e[0])); };
    co.rho = [gamma_scale](const Vec& e) {
        return std::fabs(gamma_scale) * std::min(1.0, std::fabs(e[0]));
    };
    return spec;
}

} // namespace

TEST_CASE("zero dynamics freeze the state") {
    ProblemSpec spec = callable_spec(0.0, 0.0, 0.0, {});
    TimeGrid grid(0.0, 1.0, 16);
    auto bundles = sample_paths(spec.levy, grid, 1, 3, 5);
    auto traj = simulate(spec, bundles[0], {0.7}, constant_u(0), constant_v(0));
    for (const Vec& x : traj.states) CHECK(x[0] == 0.7);
}

TEST_CASE("pure drift integrates exactly") {
    ProblemSpec spec = callable_spec(1.0, 0.0, 0.0, {});
    for (int n_steps : {1, 7, 25}) {
        TimeGrid grid(0.0, 1.0, n_steps);
        auto bundles = sample_paths(spec.levy, grid, 1, 1, 2);
        auto traj = simulate(spec, bundles[0], {0.25}, constant_u(0), constant_v(0));
        CHECK(traj.states.back()[0] == doctest::Approx(1.25).epsilon(1e-14));
    }
}

TEST_CASE("compensated jumps are centered with the compound-Poisson variance") {
    // gamma(e) = e, one atom at 1 with rate 2 on [0,1]: X_T - x0 = N - 2 with
    // N Poisson(2), so mean 0 and variance 2
    LevyMeasure m{{{{1.0}, 2.0}}};
    ProblemSpec spec = callable_spec(0.0, 0.0, 1.0, m);
    TimeGrid grid(0.0, 1.0, 10);
    const int n = 100000;
    auto bundles = sample_paths(spec.levy, grid, 1, n, 77);
    std::vector<double> ends(n);
    for (int p = 0; p < n; ++p) {
        auto traj = simulate(spec, bundles[p], {0.0}, constant_u(0), constant_v(0));
        ends[p] = traj.states.back()[0];
    }
    SampleStats s = sample_stats(ends);
    CHECK(std::fabs(s.mean) <= 3.0 * s.std_error);
    // std error of the sample variance from the fourth central moment 14
    double se_var = std::sqrt((14.0 - 4.0) / n);
    CHECK(std::fabs(s.variance - 2.0) <= 3.0 * se_var);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid grid(0.0, 1.0, 12);
    auto bundles = sample_paths(spec.levy, grid, 1, 1, 9);
    UPolicy u = [](int k, const Vec& x) { return (k + (x[0] > 0)) % 5; };
    VPolicy v = [](int, const Vec& x, int iu) { return (iu + (x[0] < 0)) % 5; };
    auto a = simulate(spec, bundles[0], {0.1}, u, v);
    auto b = simulate(spec, bundles[0], {0.1}, u, v);
    for (size_t k = 0; k < a.states.size(); ++k) CHECK(a.states[k][0] == b.states[k][0]);
}

TEST_CASE("common-noise trajectories from equal starts coincide") {
    ProblemSpec spec = make_scenario("separated_drift");
    MomentReport rep = moment_check(spec, {0.2}, {0.2}, 1000, 10, 3, 1);
    CHECK(rep.diff_ratio == 0.0);
}

TEST_CASE("moment ratios stay bounded across a refinement ladder") {
    ProblemSpec spec = make_scenario("separated_drift");
    MomentReport rep = moment_check(spec, {0.2}, {0.7}, 1500, 8, 13, 3);
    CHECK(rep.bounded);
    CHECK(rep.growth_ratio > 0.0);
    CHECK(rep.diff_ratio > 0.0);
    CHECK(rep.increment_ratio > 0.0);
    // common random numbers keep the spread near the Lipschitz scale
    for (double r : rep.ladder_diff_ratios) CHECK(r < 50.0);
}

TEST_CASE("zero dynamics give exactly zero sup deviations") {
    ProblemSpec spec = callable_spec(0.0, 0.0, 0.0, {});
    MomentReport rep = moment_check(spec, {0.0}, {0.0}, 1000, 8, 3, 1);
    CHECK(rep.diff_ratio == 0.0);
    CHECK(rep.increment_ratio == 0.0);
}

TEST_CASE("simulate validates dimensions") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid grid(0.0, 1.0, 4);
    auto bundles = sample_paths(spec.levy, grid, 1, 1, 1);
    CHECK_THROWS_AS(simulate(spec, bundles[0], {0.0, 0.0}, constant_u(0), constant_v(0)),
                    ConfigError);
    auto wrong_dim = sample_paths(spec.levy, grid, 2, 1, 1);
    CHECK_THROWS_AS(simulate(spec, wrong_dim[0], {0.0}, constant_u(0), constant_v(0)), ConfigError);
}

TEST_CASE("strategy player sees the opponent's same-step action") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid grid(0.0, 1.0, 4);
    auto bundles = sample_paths(spec.levy, grid, 1, 1, 21);
    VPolicy mirror = [](int, const Vec&, int iu) { return iu; };
    auto traj = simulate(spec, bundles[0], {0.0}, constant_u(3), mirror);
    for (int k = 0; k < 4; ++k) {
        CHECK(traj.u_indices[k] == 3);
        CHECK(traj.v_indices[k] == 3);
    }
}
