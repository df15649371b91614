#pragma once

#include <string>

#include "sdg/verify.hpp"

namespace sdg {

enum class Command { Simulate, SolveBsde, SolveGame, SolvePide, Verify, Refine, Report };

struct RunConfig {
    Command command = Command::Verify;
    std::string problem = "separated_drift";
    std::string output_dir = ".";
    uint64_t seed = 1;
    SchemeParams scheme;
    GameSide which = GameSide::Lower;
    bool force = false;
    bool quick = false;
    int n_paths = 64;
    int u_index = 0;
    int v_index = 0;
    int control_grid = 0; // > 0: re-grid both control sets on their hull
    std::string manifest_path; // for Report
};

// Exit codes: 0 ok / all checks pass, 1 config error, 2 validation failure,
// 3 numerical failure.
int run(const RunConfig& config);

} // namespace sdg
