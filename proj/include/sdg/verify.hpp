#pragma once

#include <string>

#include "sdg/io.hpp"

namespace sdg {

struct SchemeParams {
    int n_steps = 0;        // 0 = per-scenario default
    int x_nodes = 41;
    double x_lo = -2.0;
    double x_hi = 2.0;
    int gauss_order = 5;
    double cfl_target = 0.9;
    double fixed_point_tol = 1e-13;
    double delta_j = 0.0;

    void validate() const;
};

struct VerifyOptions {
    std::string problem = "separated_drift"; // registry name or file path
    uint64_t seed = 1;
    SchemeParams scheme;
    bool force = false;
    // trial counts, lowered by --quick
    int comparison_trials = 200;
    int stability_trials = 100;
    int monotonicity_trials = 100;
    int mc_paths = 10000;
};

struct CheckResult {
    std::string name;
    std::string property; // mathematical property the check exercises
    double statistic = 0.0;
    double threshold = 0.0;
    std::string comparator = "<=";
    bool pass = false;
    json details;
};

struct VerifyManifest {
    json metadata; // timestamps and tool info only
    json payload;  // deterministic given (problem, seed, scheme)
    bool all_pass = false;
    json full() const;
};

VerifyManifest run_verify(const VerifyOptions& options);

// Human-readable table for a manifest produced by run_verify.
std::string render_manifest(const json& manifest);

// Default discretization for a problem honoring the jump-expansion cap.
int default_steps(const ProblemSpec& spec, const SchemeParams& scheme);
StateGrid default_state_grid(const ProblemSpec& spec, const SchemeParams& scheme);

// Randomized small instances for the ordering/stability harnesses.
struct RandomInstancePair {
    ProblemSpec spec;
    BsdeInstance hi;
    BsdeInstance lo;
    TimeGrid tgrid;
};
RandomInstancePair make_random_instance_pair(uint64_t seed, int index, bool with_gap = true);

} // namespace sdg
