#include <CLI11.hpp>

#include "sdg/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sdg - two-player zero-sum stochastic differential games with jumps"};
    app.require_subcommand(1);

    sdg::RunConfig cfg;
    std::string which = "lower";
    std::vector<double> xbox;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--problem", cfg.problem, "scenario name or problem JSON path");
        sub->add_option("--out", cfg.output_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--steps", cfg.scheme.n_steps, "time steps (0 = auto)");
        sub->add_option("--xnodes", cfg.scheme.x_nodes, "state grid nodes per dimension");
        sub->add_option("--xbox", xbox, "state box lo hi")->expected(2);
        sub->add_option("--gauss", cfg.scheme.gauss_order, "Gauss-Hermite order");
        sub->add_option("--cfl", cfg.scheme.cfl_target, "CFL target in (0,1]");
        sub->add_option("--fp-tol", cfg.scheme.fixed_point_tol, "implicit step tolerance");
        sub->add_option("--delta-j", cfg.scheme.delta_j, "small-jump split threshold");
        sub->add_option("--ctrl-grid", cfg.control_grid,
                        "re-grid both control sets as n-point lattices on their hull");
        sub->add_flag("--force", cfg.force, "run even if hypothesis validation fails");
    };

    auto* sim = app.add_subcommand("simulate", "sample noise and forward trajectories");
    add_common(sim);
    sim->add_option("--paths", cfg.n_paths, "number of sampled paths");
    sim->add_option("--u-idx", cfg.u_index, "first player control index");
    sim->add_option("--v-idx", cfg.v_index, "second player control index");

    auto* bsde = app.add_subcommand("solve-bsde", "backward solve under fixed feedback controls");
    add_common(bsde);
    bsde->add_option("--u-idx", cfg.u_index, "first player control index");
    bsde->add_option("--v-idx", cfg.v_index, "second player control index");

    auto* game = app.add_subcommand("solve-game", "lower or upper game value by dynamic programming");
    add_common(game);
    game->add_option("--which", which, "lower|upper");

    auto* pide = app.add_subcommand("solve-pide", "explicit monotone finite-difference solve");
    add_common(pide);
    pide->add_option("--which", which, "lower|upper");

    auto* verify = app.add_subcommand("verify", "run the full property suite and write a manifest");
    add_common(verify);
    verify->add_flag("--quick", cfg.quick, "reduced trial counts");

    auto* refine = app.add_subcommand("refine", "resolution ladder study");
    add_common(refine);

    auto* report = app.add_subcommand("report", "render a verify manifest as a table");
    report->add_option("manifest", cfg.manifest_path, "manifest JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    if (xbox.size() == 2) {
        cfg.scheme.x_lo = xbox[0];
        cfg.scheme.x_hi = xbox[1];
    }
    if (which == "upper")
        cfg.which = sdg::GameSide::Upper;
    else if (which != "lower") {
        std::cerr << "config error: --which must be lower or upper\n";
        return 1;
    }

    if (sim->parsed()) cfg.command = sdg::Command::Simulate;
    if (bsde->parsed()) cfg.command = sdg::Command::SolveBsde;
    if (game->parsed()) cfg.command = sdg::Command::SolveGame;
    if (pide->parsed()) cfg.command = sdg::Command::SolvePide;
    if (verify->parsed()) cfg.command = sdg::Command::Verify;
    if (refine->parsed()) cfg.command = sdg::Command::Refine;
    if (report->parsed()) cfg.command = sdg::Command::Report;

    return sdg::run(cfg);
}
