#include <doctest.h>

#include <cmath>

#include "sdg/levy.hpp"
#include "sdg/stats.hpp"

using namespace sdg;

namespace {

LevyMeasure single_atom(double mark, double rate) { return LevyMeasure{{{{mark}, rate}}}; }

} // namespace

TEST_CASE("compensator integral is the rate-weighted sum over atoms") {
    LevyMeasure m{{{{1.0}, 2.0}, {{-1.0}, 3.0}}};
    CHECK(compensator_integral(m, [](const Vec& e) { return e[0]; }) == doctest::Approx(-1.0));
    CHECK(compensator_integral(m, [](const Vec&) { return 0.0; }) == 0.0);
    LevyMeasure half = single_atom(0.5, 4.0);
    double wedge2 = compensator_integral(half, [](const Vec& e) {
        double n = std::fabs(e[0]);
        return std::min(1.0, n * n);
    });
    CHECK(wedge2 == doctest::Approx(1.0));
}

TEST_CASE("no atoms means no jump events") {
    LevyMeasure empty;
    TimeGrid grid(0.0, 1.0, 10);
    auto bundles = sample_paths(empty, grid, 1, 8, 7);
    for (const auto& b : bundles)
        for (const auto& events : b.jump_events) CHECK(events.empty());
}

TEST_CASE("brownian increments carry mean zero and variance dt") {
    TimeGrid grid(0.0, 1.0, 5);
    auto bundles = sample_paths({}, grid, 1, 20000, 23);
    std::vector<double> incs;
    incs.reserve(bundles.size() * 5);
    for (const auto& b : bundles)
        for (const auto& inc : b.brownian_increments) incs.push_back(inc[0]);
    SampleStats s = sample_stats(incs);
    CHECK(std::fabs(s.mean) <= 3.0 * s.std_error);
    CHECK(s.variance == doctest::Approx(grid.dt()).epsilon(0.02));
}

TEST_CASE("per-step jump counts match the Poisson mean") {
    // rate 2 on dt = 0.5 steps: one jump per step on average
    TimeGrid grid(0.0, 1.0, 2);
    auto bundles = sample_paths(single_atom(1.0, 2.0), grid, 1, 100000, 11);
    std::vector<double> counts;
    counts.reserve(bundles.size() * 2);
    for (const auto& b : bundles)
        for (const auto& events : b.jump_events) counts.push_back(static_cast<double>(events.size()));
    SampleStats s = sample_stats(counts);
    CHECK(std::fabs(s.mean - 1.0) <= 3.0 * s.std_error);
    CHECK(s.variance == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sampling is deterministic in the seed") {
    TimeGrid grid(0.0, 1.0, 6);
    LevyMeasure m{{{{0.5}, 1.0}, {{-0.25}, 0.5}}};
    auto a = sample_paths(m, grid, 2, 5, 42);
    auto b = sample_paths(m, grid, 2, 5, 42);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    auto c = sample_paths(m, grid, 2, 5, 43);
    CHECK_FALSE(a[0] == c[0]);
}

TEST_CASE("segment swap is an exact involution") {
    TimeGrid grid(0.0, 1.0, 8);
    LevyMeasure m = single_atom(1.0, 1.2);
    auto bundles = sample_paths(m, grid, 1, 20, 3);
    const double t = 0.5, ell = 0.25;
    for (const auto& b : bundles) {
        PathBundle twice = segment_swap(segment_swap(b, t, ell), t, ell);
        CHECK(twice == b);
    }
}

TEST_CASE("segment swap fixes bundles that are empty on the swapped window") {
    TimeGrid grid(0.0, 1.0, 8);
    auto bundles = sample_paths(single_atom(1.0, 0.8), grid, 1, 4, 5);
    PathBundle b = bundles[0];
    for (int k = 2; k < 6; ++k) { // (t-2l, t] with t=0.75, l=0.25 covers steps 2..5
        b.brownian_increments[k] = Vec(1, 0.0);
        b.jump_events[k].clear();
    }
    PathBundle swapped = segment_swap(b, 0.75, 0.25);
    CHECK(swapped == b);
}

TEST_CASE("segment swap leaves the noise outside the window untouched") {
    TimeGrid grid(0.0, 1.0, 8);
    auto bundles = sample_paths(single_atom(1.0, 1.5), grid, 1, 50, 9);
    // window (0.25, 0.75] covers steps 2..5; steps 0..1 and 6..7 stay put
    for (const auto& b : bundles) {
        PathBundle s = segment_swap(b, 0.75, 0.25);
        for (int k : {0, 1, 6, 7}) {
            CHECK(s.brownian_increments[k] == b.brownian_increments[k]);
            CHECK(s.jump_events[k].size() == b.jump_events[k].size());
        }
        CHECK(s.brownian_increments[2] == b.brownian_increments[4]);
        CHECK(s.brownian_increments[4] == b.brownian_increments[2]);
    }
}

TEST_CASE("segment swap validates alignment and reach") {
    TimeGrid grid(0.0, 1.0, 8);
    auto bundles = sample_paths(single_atom(1.0, 1.0), grid, 1, 1, 1);
    CHECK_THROWS_AS(segment_swap(bundles[0], 0.5, 0.3), ConfigError);        // not step aligned
    CHECK_THROWS_AS(segment_swap(bundles[0], 0.25, 0.25), std::domain_error); // t-2l < t0
}

TEST_CASE("segment swap preserves the law of increments and marks") {
    // two-sample KS on the swapped window, chi-square on mark frequencies
    TimeGrid grid(0.0, 1.0, 4);
    LevyMeasure m{{{{1.0}, 0.4}, {{-0.5}, 0.3}}};
    const int n = 100000;
    auto fresh = sample_paths(m, grid, 1, n, 100);
    auto swapped = sample_paths(m, grid, 1, n, 200);
    std::vector<double> inc_fresh, inc_swapped;
    double marks_fresh[2] = {0, 0}, marks_swapped[2] = {0, 0};
    std::vector<double> count_fresh, count_swapped;
    for (int p = 0; p < n; ++p) {
        PathBundle s = segment_swap(swapped[p], 1.0, 0.5);
        for (int k = 0; k < 4; ++k) {
            inc_fresh.push_back(fresh[p].brownian_increments[k][0]);
            inc_swapped.push_back(s.brownian_increments[k][0]);
            count_fresh.push_back(static_cast<double>(fresh[p].jump_events[k].size()));
            count_swapped.push_back(static_cast<double>(s.jump_events[k].size()));
            for (const auto& ev : fresh[p].jump_events[k]) ++marks_fresh[ev.atom];
            for (const auto& ev : s.jump_events[k]) ++marks_swapped[ev.atom];
        }
    }
    CHECK(ks_two_sample_pvalue(inc_fresh, inc_swapped) > 0.01);
    CHECK(ks_two_sample_pvalue(count_fresh, count_swapped) > 0.01);
    double total_f = marks_fresh[0] + marks_fresh[1];
    double total_s = marks_swapped[0] + marks_swapped[1];
    double chi2 = 0.0;
    for (int a = 0; a < 2; ++a) {
        double expected = total_s * (marks_fresh[a] / total_f);
        chi2 += (marks_swapped[a] - expected) * (marks_swapped[a] - expected) / expected;
    }
    CHECK(chi2_pvalue(chi2, 1) > 0.01);
}

TEST_CASE("jump events are sorted within a step and carry valid atoms") {
    TimeGrid grid(0.0, 2.0, 4);
    LevyMeasure m{{{{1.0}, 0.2}, {{2.0}, 0.15}}};
    auto bundles = sample_paths(m, grid, 1, 200, 17);
    for (const auto& b : bundles) {
        for (const auto& events : b.jump_events) {
            for (size_t j = 0; j < events.size(); ++j) {
                CHECK(events[j].atom >= 0);
                CHECK(events[j].atom < 2);
                CHECK(events[j].offset >= 0.0);
                CHECK(events[j].offset <= grid.dt());
                if (j > 0) CHECK(events[j].offset >= events[j - 1].offset);
            }
        }
    }
}
