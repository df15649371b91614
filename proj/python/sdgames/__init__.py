"""Two-player zero-sum stochastic differential games with jumps."""

try:
    from ._sdgames import (  # noqa: F401
        Problem,
        __version__,
        isaacs_gap,
        load_problem,
        sample_paths,
        scenario_names,
        simulate,
        solve_bsde,
        solve_game,
        solve_pide,
        validate,
    )
except ImportError:  # build-tree usage: the extension sits on sys.path directly
    from _sdgames import (  # noqa: F401
        Problem,
        __version__,
        isaacs_gap,
        load_problem,
        sample_paths,
        scenario_names,
        simulate,
        solve_bsde,
        solve_game,
        solve_pide,
        validate,
    )

__all__ = [
    "Problem",
    "isaacs_gap",
    "load_problem",
    "sample_paths",
    "scenario_names",
    "simulate",
    "solve_bsde",
    "solve_game",
    "solve_pide",
    "validate",
]
