#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sdg/cli.hpp"

using namespace sdg;

namespace {

std::string temp_dir(const char* tag) {
    auto dir = std::filesystem::temp_directory_path() / (std::string("sdg_test_") + tag);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string first_line(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_CASE("value field binary dump round-trips") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid tg(0.0, 1.0, 6);
    StateGrid sg = StateGrid::uniform({-1.5}, {1.5}, {13});
    ConditionalExpectationEngine engine;
    ValueField field = solve_value(spec, GameSide::Lower, tg, sg, engine);
    std::string path = temp_dir("bin") + "/value.bin";
    write_value_binary(path, field);
    ValueField back = read_value_binary(path);
    CHECK(back.which == field.which);
    CHECK(back.tgrid.n_steps == field.tgrid.n_steps);
    REQUIRE(back.values.size() == field.values.size());
    for (size_t k = 0; k < field.values.size(); ++k)
        for (long i = 0; i < sg.size(); ++i) CHECK(back.values[k][i] == field.values[k][i]);
    std::ofstream(path, std::ios::binary) << "not a dump";
    CHECK_THROWS_AS(read_value_binary(path), ParseError);
}

TEST_CASE("csv exports carry the documented headers") {
    ProblemSpec spec = make_scenario("separated_drift");
    TimeGrid tg(0.0, 1.0, 8);
    auto bundles = sample_paths(spec.levy, tg, 1, 2, 3);
    std::string dir = temp_dir("csv");
    write_paths_csv(dir + "/paths.csv", bundles, spec.levy);
    CHECK(first_line(dir + "/paths.csv") == "step,path,dB_1,n_jumps,marks");
    auto traj = simulate(spec, bundles[0], {0.0}, constant_u(0), constant_v(0));
    write_trajectory_csv(dir + "/traj.csv", spec, traj);
    CHECK(first_line(dir + "/traj.csv") == "step,time,x_1,u,v");
    StateGrid sg = StateGrid::uniform({-1.0}, {1.0}, {9});
    ConditionalExpectationEngine engine;
    BsdeSolution sol = solve_bsde(spec, tg, sg, constant_u(0), constant_v(0),
                                  spec.coefficients.terminal, engine);
    write_bsde_csv(dir + "/bsde.csv", sol);
    CHECK(first_line(dir + "/bsde.csv") == "step,node,x_1,y,z_1,k_bar");
    ValueField field = solve_value(spec, GameSide::Lower, tg, sg, engine);
    write_value_csv(dir + "/value.csv", field);
    CHECK(first_line(dir + "/value.csv") == "step,time,node,x_1,value,u_idx,v_idx");
}

TEST_CASE("manifest rendering flags failures and rejects malformed input") {
    json manifest = {{"metadata", json::object()},
                     {"payload",
                      {{"all_pass", false},
                       {"checks",
                        json::array({{{"name", "alpha"},
                                      {"property", "something"},
                                      {"statistic", 0.5},
                                      {"threshold", 0.1},
                                      {"comparator", "<="},
                                      {"pass", false},
                                      {"details", json::object()}}})}}}};
    std::string table = render_manifest(manifest);
    CHECK(table.find("FAIL") != std::string::npos);
    CHECK(table.find("alpha") != std::string::npos);
    CHECK_THROWS_AS(render_manifest(json{{"payload", {{"checks", json::array()}}}}), ParseError);
    CHECK_THROWS_AS(render_manifest(json::object()), ParseError);
}

TEST_CASE("verify command writes a manifest and reports success") {
    RunConfig cfg;
    cfg.command = Command::Verify;
    cfg.problem = "zero_dynamics";
    cfg.output_dir = temp_dir("verify");
    cfg.quick = true;
    cfg.seed = 12;
    CHECK(run(cfg) == 0);
    std::ifstream in(cfg.output_dir + "/manifest.json");
    REQUIRE(in.good());
    json manifest;
    in >> manifest;
    CHECK(manifest["payload"]["all_pass"].get<bool>());

    RunConfig report_cfg;
    report_cfg.command = Command::Report;
    report_cfg.manifest_path = cfg.output_dir + "/manifest.json";
    CHECK(run(report_cfg) == 0);
}

TEST_CASE("manifest payload is byte-identical across same-seed runs") {
    VerifyOptions options;
    options.problem = "zero_dynamics";
    options.seed = 4;
    options.comparison_trials = 10;
    options.stability_trials = 5;
    options.monotonicity_trials = 5;
    options.mc_paths = 500;
    std::string a = run_verify(options).payload.dump();
    std::string b = run_verify(options).payload.dump();
    CHECK(a == b);
}

TEST_CASE("a driver decreasing in its jump argument fails validation at the gate") {
    json j = serialize_problem(make_scenario("driver_coupled"));
    j["coefficients"]["params"]["driver"]["ak"] = -0.4;
    std::string dir = temp_dir("badspec");
    std::string path = dir + "/bad.json";
    std::ofstream(path) << j.dump(2);

    RunConfig cfg;
    cfg.command = Command::SolveGame;
    cfg.problem = path;
    cfg.output_dir = dir;
    CHECK(run(cfg) == 2);
    cfg.force = true;
    CHECK(run(cfg) == 0);
}

TEST_CASE("simulate command emits paths, a trajectory and a moment report") {
    RunConfig cfg;
    cfg.command = Command::Simulate;
    cfg.problem = "separated_drift";
    cfg.output_dir = temp_dir("sim");
    cfg.n_paths = 1000;
    CHECK(run(cfg) == 0);
    CHECK(std::filesystem::exists(cfg.output_dir + "/paths.csv"));
    CHECK(std::filesystem::exists(cfg.output_dir + "/trajectory.csv"));
    CHECK(std::filesystem::exists(cfg.output_dir + "/moments.json"));
}

TEST_CASE("unknown problems exit with the configuration code") {
    RunConfig cfg;
    cfg.command = Command::SolveGame;
    cfg.problem = "/nonexistent/path.json";
    cfg.output_dir = temp_dir("missing");
    CHECK(run(cfg) == 1);
}
