"""Smoke tests for the python bindings."""

import json
import os
import sys

MODULE_DIR = os.environ.get("SDGAMES_MODULE_DIR")
if MODULE_DIR:
    sys.path.insert(0, MODULE_DIR)

import _sdgames as sdg  # noqa: E402


def test_scenario_registry():
    names = sdg.scenario_names()
    assert "separated_drift" in names
    assert len(names) == 5
    problem = sdg.load_problem("separated_drift")
    assert problem.name == "separated_drift"
    assert problem.state_dim == 1
    spec = json.loads(problem.to_json())
    assert spec["schema_version"] == 1
    assert spec["levy"]["atoms"][0]["rate"] == 1.0


def test_problem_file_roundtrip(tmp_path):
    problem = sdg.load_problem("driver_coupled")
    path = tmp_path / "problem.json"
    path.write_text(problem.to_json())
    again = sdg.load_problem(str(path))
    assert again.to_json() == problem.to_json()


def test_sampling_is_deterministic():
    problem = sdg.load_problem("jump_heavy")
    a = sdg.sample_paths(problem, n_steps=10, n_paths=3, seed=5)
    b = sdg.sample_paths(problem, n_steps=10, n_paths=3, seed=5)
    assert a == b
    c = sdg.sample_paths(problem, n_steps=10, n_paths=3, seed=6)
    assert a != c
    total_jumps = sum(len(step) for path in a for step in path["jump_events"])
    assert total_jumps > 0


def test_simulate_runs_from_the_start_point():
    problem = sdg.load_problem("separated_drift")
    traj = sdg.simulate(problem, n_steps=12, seed=3, x0=[0.25])
    assert traj["states"][0] == [0.25]
    assert len(traj["states"]) == 13


def test_game_fields_are_ordered_and_anchored():
    problem = sdg.load_problem("bilinear_gap")
    lower = sdg.solve_game(problem, "lower", x_nodes=21)
    upper = sdg.solve_game(problem, "upper", x_nodes=21)
    nodes = lower["nodes"][0]
    # terminal slice equals the terminal function
    for i, x in enumerate(nodes):
        assert abs(lower["values"][-1][i] - x) < 1e-12
    # lower never exceeds upper
    for lo_row, up_row in zip(lower["values"], upper["values"]):
        for lo, up in zip(lo_row, up_row):
            assert up - lo >= -1e-10
    # the bilinear drift opens a strict gap at the start
    mid = len(nodes) // 2
    assert upper["values"][0][mid] - lower["values"][0][mid] > 0.5


def test_pide_agrees_with_game_on_the_separable_scenario():
    problem = sdg.load_problem("separated_drift")
    game = sdg.solve_game(problem, "lower", x_nodes=41)
    pide = sdg.solve_pide(problem, "lower", x_nodes=41)
    for i, x in enumerate(game["nodes"][0]):
        assert abs(game["values"][0][i] - x) < 1e-10
        assert abs(pide["values"][0][i] - x) < 1e-10
    gap = sdg.isaacs_gap(problem, x_nodes=41)
    assert gap["max_gap"] <= 1e-12


def test_bsde_solve_exposes_fields():
    problem = sdg.load_problem("driver_coupled")
    sol = sdg.solve_bsde(problem, x_nodes=21)
    assert len(sol["y"]) == len(sol["times"])
    assert len(sol["k_bar"]) == len(sol["times"]) - 1


def test_validation_report():
    problem = sdg.load_problem("separated_drift")
    report = sdg.validate(problem)
    assert report["all_pass"]
    clauses = {c["clause"] for c in report["clauses"]}
    assert "driver_monotone_in_jump_arg" in clauses
