#include "sdg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace sdg {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const std::string& file) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / file).string();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

ControlSet regrid_on_hull(const ControlSet& cs, int n) {
    Vec lo = cs.points[0], hi = cs.points[0];
    for (const Vec& p : cs.points)
        for (size_t d = 0; d < p.size(); ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    for (size_t d = 0; d < lo.size(); ++d)
        if (!(lo[d] < hi[d])) hi[d] = lo[d] + 1e-9; // degenerate axis
    return ControlSet::grid(lo, hi, std::vector<int>(lo.size(), n), cs.label);
}

ProblemSpec load_with_overrides(const RunConfig& cfg) {
    ProblemSpec spec = load_problem(cfg.problem);
    if (cfg.control_grid > 0) {
        spec.u_set = regrid_on_hull(spec.u_set, cfg.control_grid);
        spec.v_set = regrid_on_hull(spec.v_set, cfg.control_grid);
    }
    return spec;
}

void require_hypotheses(const ProblemSpec& spec, bool force, uint64_t seed) {
    ProbeConfig probe;
    probe.seed = seed + 5;
    ValidationReport rep = validate_hypotheses(spec, probe);
    if (!rep.all_pass() && !force) {
        std::cerr << rep.to_json().dump(2) << '\n';
        throw ValidationError("hypothesis validation failed (use --force to run anyway)");
    }
}

int run_simulate(const RunConfig& cfg) {
    ProblemSpec spec = load_with_overrides(cfg);
    require_hypotheses(spec, cfg.force, cfg.seed);
    int n_steps = default_steps(spec, cfg.scheme);
    TimeGrid grid(0.0, spec.horizon, n_steps);
    auto bundles = sample_paths(spec.levy, grid, spec.brownian_dim, cfg.n_paths, cfg.seed);
    write_paths_csv(out_path(cfg, "paths.csv"), bundles, spec.levy);
    Vec x0(spec.state_dim, 0.0);
    auto traj = simulate(spec, bundles[0], x0, constant_u(cfg.u_index), constant_v(cfg.v_index));
    write_trajectory_csv(out_path(cfg, "trajectory.csv"), spec, traj);
    MomentReport rep = moment_check(spec, x0, Vec(spec.state_dim, 0.5),
                                    std::max(1000, cfg.n_paths), n_steps, cfg.seed);
    write_json(out_path(cfg, "moments.json"), rep.to_json());
    std::cout << "wrote paths.csv, trajectory.csv, moments.json to " << cfg.output_dir << '\n';
    return rep.bounded ? 0 : 2;
}

int run_solve_bsde(const RunConfig& cfg) {
    ProblemSpec spec = load_with_overrides(cfg);
    require_hypotheses(spec, cfg.force, cfg.seed);
    TimeGrid tgrid(0.0, spec.horizon, default_steps(spec, cfg.scheme));
    StateGrid sgrid = default_state_grid(spec, cfg.scheme);
    ConditionalExpectationEngine engine;
    engine.gauss_order = cfg.scheme.gauss_order;
    engine.fixed_point_tol = cfg.scheme.fixed_point_tol;
    BsdeSolution sol = solve_bsde(spec, tgrid, sgrid, constant_u(cfg.u_index),
                                  constant_v(cfg.v_index), spec.coefficients.terminal, engine);
    write_bsde_csv(out_path(cfg, "bsde.csv"), sol);
    write_bsde_binary(out_path(cfg, "bsde.bin"), sol);
    json summary = {{"problem", spec.name},
                    {"n_steps", tgrid.n_steps},
                    {"nodes", sgrid.size()},
                    {"y0_at_center", sol.value_at(0, Vec(spec.state_dim, 0.0))}};
    write_json(out_path(cfg, "summary.json"), summary);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_solve_game(const RunConfig& cfg) {
    ProblemSpec spec = load_with_overrides(cfg);
    require_hypotheses(spec, cfg.force, cfg.seed);
    TimeGrid tgrid(0.0, spec.horizon, default_steps(spec, cfg.scheme));
    StateGrid sgrid = default_state_grid(spec, cfg.scheme);
    ConditionalExpectationEngine engine;
    engine.gauss_order = cfg.scheme.gauss_order;
    engine.fixed_point_tol = cfg.scheme.fixed_point_tol;
    ValueField field = solve_value(spec, cfg.which, tgrid, sgrid, engine);
    write_value_csv(out_path(cfg, "value.csv"), field);
    write_value_binary(out_path(cfg, "value.bin"), field);
    json summary = {{"problem", spec.name},
                    {"which", cfg.which == GameSide::Lower ? "lower" : "upper"},
                    {"n_steps", tgrid.n_steps},
                    {"nodes", sgrid.size()},
                    {"value_at_center", field.at(0, Vec(spec.state_dim, 0.0))}};
    write_json(out_path(cfg, "summary.json"), summary);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_solve_pide(const RunConfig& cfg) {
    ProblemSpec spec = load_with_overrides(cfg);
    require_hypotheses(spec, cfg.force, cfg.seed);
    StateGrid sgrid = default_state_grid(spec, cfg.scheme);
    int n_steps = cfg.scheme.n_steps;
    if (n_steps == 0) {
        PideStepper probe(spec, cfg.which, sgrid, 1e-6, cfg.scheme.delta_j, cfg.scheme.cfl_target);
        n_steps = probe.required_steps(0.0, spec.horizon);
    }
    TimeGrid tgrid(0.0, spec.horizon, n_steps);
    PideSolution sol = solve_pide(spec, cfg.which, tgrid, sgrid, cfg.scheme.delta_j,
                                  cfg.scheme.cfl_target);
    write_pide_csv(out_path(cfg, "pide.csv"), sol);
    GapReport gap = isaacs_gap(spec, tgrid, sgrid, sol.values, cfg.scheme.delta_j);
    write_json(out_path(cfg, "isaacs_gap.json"), gap.to_json());
    json summary = {{"problem", spec.name},
                    {"which", cfg.which == GameSide::Lower ? "lower" : "upper"},
                    {"n_steps", n_steps},
                    {"cfl_number", sol.cfl_number},
                    {"value_at_center", sol.at(0, Vec(spec.state_dim, 0.0))},
                    {"max_hamiltonian_gap", gap.max_gap}};
    write_json(out_path(cfg, "summary.json"), summary);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_verify_cmd(const RunConfig& cfg) {
    VerifyOptions options;
    options.problem = cfg.problem;
    options.seed = cfg.seed;
    options.scheme = cfg.scheme;
    options.force = cfg.force;
    if (cfg.quick) {
        options.comparison_trials = 40;
        options.stability_trials = 25;
        options.monotonicity_trials = 25;
        options.mc_paths = 2000;
    }
    VerifyManifest manifest = run_verify(options);
    write_json(out_path(cfg, "manifest.json"), manifest.full());
    std::cout << render_manifest(manifest.full());
    return manifest.all_pass ? 0 : 2;
}

int run_refine(const RunConfig& cfg) {
    ProblemSpec spec = load_with_overrides(cfg);
    require_hypotheses(spec, cfg.force, cfg.seed);
    ConditionalExpectationEngine engine;
    engine.gauss_order = cfg.scheme.gauss_order;
    engine.fixed_point_tol = cfg.scheme.fixed_point_tol;

    std::ofstream out(out_path(cfg, "refine.csv"));
    out << "rung,game_steps,pide_steps,x_nodes,dx,cross_solver_sup,dpp_discrepancy\n";
    int x_nodes = cfg.scheme.x_nodes;
    int game_steps = std::max(8, default_steps(spec, cfg.scheme));
    double prev = 0.0;
    bool monotone = true;
    for (int rung = 0; rung < 3; ++rung) {
        StateGrid sg = StateGrid::uniform({cfg.scheme.x_lo}, {cfg.scheme.x_hi}, {x_nodes});
        // each solver refines on its own stable coupling; distances are read
        // off the shared start slice
        PideStepper probe(spec, GameSide::Lower, sg, 1e-6, cfg.scheme.delta_j, cfg.scheme.cfl_target);
        int pide_steps = probe.required_steps(0.0, spec.horizon);
        TimeGrid tg_pide(0.0, spec.horizon, pide_steps);
        PideSolution pide = solve_pide(spec, GameSide::Lower, tg_pide, sg, cfg.scheme.delta_j,
                                       cfg.scheme.cfl_target);
        TimeGrid tg_game(0.0, spec.horizon, game_steps);
        ValueField game = solve_value(spec, GameSide::Lower, tg_game, sg, engine);
        double sup = 0.0;
        for (long i = 0; i < sg.size(); ++i)
            sup = std::max(sup, std::fabs(pide.values[0][i] - game.values[0][i]));
        DppReport dpp = dpp_check(spec, GameSide::Lower, tg_game, sg, tg_game.n_steps / 2, engine, 0);
        out << rung << ',' << game_steps << ',' << pide_steps << ',' << x_nodes << ','
            << format_double(sg.min_spacing()) << ',' << format_double(sup) << ','
            << format_double(dpp.discrepancy) << '\n';
        if (rung > 0 && sup > prev + 1e-12) monotone = false;
        prev = sup;
        x_nodes = x_nodes * 2 - 1;
        game_steps *= 2;
    }
    std::cout << "wrote refine.csv to " << cfg.output_dir << '\n';
    return monotone ? 0 : 2;
}

int run_report(const RunConfig& cfg) {
    std::ifstream in(cfg.manifest_path);
    if (!in) throw ParseError("cannot open manifest: " + cfg.manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw ParseError(std::string("manifest: invalid JSON: ") + e.what());
    }
    std::cout << render_manifest(manifest);
    return 0;
}

} // namespace

int run(const RunConfig& config) {
    try {
        switch (config.command) {
            case Command::Simulate: return run_simulate(config);
            case Command::SolveBsde: return run_solve_bsde(config);
            case Command::SolveGame: return run_solve_game(config);
            case Command::SolvePide: return run_solve_pide(config);
            case Command::Verify: return run_verify_cmd(config);
            case Command::Refine: return run_refine(config);
            case Command::Report: return run_report(config);
        }
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation failure: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace sdg
