#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdg/verify.hpp"

namespace py = pybind11;
using namespace sdg;

namespace {

py::dict value_field_dict(const ValueField& f) {
    py::dict d;
    d["which"] = f.which == GameSide::Lower ? "lower" : "upper";
    d["times"] = f.tgrid.nodes;
    d["nodes"] = f.sgrid.axes;
    d["values"] = f.values;
    d["u_sel"] = f.u_sel;
    d["v_sel"] = f.v_sel;
    return d;
}

GameSide side_from(const std::string& which) {
    if (which == "lower") return GameSide::Lower;
    if (which == "upper") return GameSide::Upper;
    throw ConfigError("which must be 'lower' or 'upper'");
}

SchemeParams scheme_from(int n_steps, int x_nodes, double x_lo, double x_hi, int gauss_order,
                         double cfl_target) {
    SchemeParams s;
    s.n_steps = n_steps;
    s.x_nodes = x_nodes;
    s.x_lo = x_lo;
    s.x_hi = x_hi;
    s.gauss_order = gauss_order;
    s.cfl_target = cfl_target;
    s.validate();
    return s;
}

} // namespace

PYBIND11_MODULE(_sdgames, m) {
    m.doc() = "two-player zero-sum stochastic differential games with jumps";

    py::class_<ProblemSpec>(m, "Problem")
        .def_property_readonly("name", [](const ProblemSpec& p) { return p.name; })
        .def_property_readonly("horizon", [](const ProblemSpec& p) { return p.horizon; })
        .def_property_readonly("state_dim", [](const ProblemSpec& p) { return p.state_dim; })
        .def_property_readonly("brownian_dim", [](const ProblemSpec& p) { return p.brownian_dim; })
        .def("to_json", [](const ProblemSpec& p) { return serialize_problem(p).dump(2); });

    m.def("scenario_names", &scenario_names);
    m.def("load_problem", &load_problem, py::arg("name_or_path"),
          "Load a registry scenario or a problem JSON file");

    m.def(
        "validate",
        [](const ProblemSpec& spec) {
            ValidationReport rep = validate_hypotheses(spec);
            return py::module_::import("json").attr("loads")(rep.to_json().dump());
        },
        py::arg("problem"));

    m.def(
        "sample_paths",
        [](const ProblemSpec& spec, int n_steps, int n_paths, uint64_t seed) {
            TimeGrid grid(0.0, spec.horizon, n_steps);
            auto bundles = sample_paths(spec.levy, grid, spec.brownian_dim, n_paths, seed);
            py::list out;
            for (const auto& b : bundles) {
                py::dict d;
                d["brownian_increments"] = b.brownian_increments;
                py::list jumps;
                for (const auto& step_events : b.jump_events) {
                    py::list ev;
                    for (const auto& e : step_events) ev.append(py::make_tuple(e.offset, e.atom));
                    jumps.append(ev);
                }
                d["jump_events"] = jumps;
                out.append(d);
            }
            return out;
        },
        py::arg("problem"), py::arg("n_steps"), py::arg("n_paths"), py::arg("seed"));

    m.def(
        "simulate",
        [](const ProblemSpec& spec, int n_steps, uint64_t seed, const Vec& x0, int u_idx, int v_idx) {
            TimeGrid grid(0.0, spec.horizon, n_steps);
            auto bundles = sample_paths(spec.levy, grid, spec.brownian_dim, 1, seed);
            auto traj = simulate(spec, bundles[0], x0, constant_u(u_idx), constant_v(v_idx));
            py::dict d;
            d["times"] = traj.grid.nodes;
            d["states"] = traj.states;
            return d;
        },
        py::arg("problem"), py::arg("n_steps"), py::arg("seed"), py::arg("x0"), py::arg("u_idx") = 0,
        py::arg("v_idx") = 0);

    m.def(
        "solve_game",
        [](const ProblemSpec& spec, const std::string& which, int n_steps, int x_nodes, double x_lo,
           double x_hi, int gauss_order) {
            SchemeParams scheme = scheme_from(n_steps, x_nodes, x_lo, x_hi, gauss_order, 0.9);
            TimeGrid tgrid(0.0, spec.horizon, default_steps(spec, scheme));
            StateGrid sgrid = default_state_grid(spec, scheme);
            ConditionalExpectationEngine engine;
            engine.gauss_order = gauss_order;
            return value_field_dict(solve_value(spec, side_from(which), tgrid, sgrid, engine));
        },
        py::arg("problem"), py::arg("which") = "lower", py::arg("n_steps") = 0,
        py::arg("x_nodes") = 41, py::arg("x_lo") = -2.0, py::arg("x_hi") = 2.0,
        py::arg("gauss_order") = 5);

    m.def(
        "solve_bsde",
        [](const ProblemSpec& spec, int n_steps, int x_nodes, double x_lo, double x_hi,
           int gauss_order, int u_idx, int v_idx) {
            SchemeParams scheme = scheme_from(n_steps, x_nodes, x_lo, x_hi, gauss_order, 0.9);
            TimeGrid tgrid(0.0, spec.horizon, default_steps(spec, scheme));
            StateGrid sgrid = default_state_grid(spec, scheme);
            ConditionalExpectationEngine engine;
            engine.gauss_order = gauss_order;
            BsdeSolution sol = solve_bsde(spec, tgrid, sgrid, constant_u(u_idx), constant_v(v_idx),
                                          spec.coefficients.terminal, engine);
            py::dict d;
            d["times"] = sol.tgrid.nodes;
            d["nodes"] = sol.sgrid.axes;
            d["y"] = sol.y;
            d["k_bar"] = sol.k_bar;
            return d;
        },
        py::arg("problem"), py::arg("n_steps") = 0, py::arg("x_nodes") = 41, py::arg("x_lo") = -2.0,
        py::arg("x_hi") = 2.0, py::arg("gauss_order") = 5, py::arg("u_idx") = 0, py::arg("v_idx") = 0);

    m.def(
        "solve_pide",
        [](const ProblemSpec& spec, const std::string& which, int x_nodes, double x_lo, double x_hi,
           double cfl_target) {
            SchemeParams scheme = scheme_from(0, x_nodes, x_lo, x_hi, 5, cfl_target);
            StateGrid sgrid = default_state_grid(spec, scheme);
            PideStepper probe(spec, side_from(which), sgrid, 1e-6, 0.0, cfl_target);
            TimeGrid tgrid(0.0, spec.horizon, probe.required_steps(0.0, spec.horizon));
            PideSolution sol = solve_pide(spec, side_from(which), tgrid, sgrid, 0.0, cfl_target);
            py::dict d;
            d["times"] = sol.tgrid.nodes;
            d["nodes"] = sol.sgrid.axes;
            d["values"] = sol.values;
            d["cfl_number"] = sol.cfl_number;
            return d;
        },
        py::arg("problem"), py::arg("which") = "lower", py::arg("x_nodes") = 41,
        py::arg("x_lo") = -2.0, py::arg("x_hi") = 2.0, py::arg("cfl_target") = 0.9);

    m.def(
        "isaacs_gap",
        [](const ProblemSpec& spec, int n_steps, int x_nodes, double x_lo, double x_hi) {
            SchemeParams scheme = scheme_from(n_steps, x_nodes, x_lo, x_hi, 5, 0.9);
            TimeGrid tgrid(0.0, spec.horizon, default_steps(spec, scheme));
            StateGrid sgrid = default_state_grid(spec, scheme);
            ConditionalExpectationEngine engine;
            ValueField lower = solve_value(spec, GameSide::Lower, tgrid, sgrid, engine);
            GapReport rep = isaacs_gap(spec, tgrid, sgrid, lower.values);
            return py::module_::import("json").attr("loads")(rep.to_json().dump());
        },
        py::arg("problem"), py::arg("n_steps") = 0, py::arg("x_nodes") = 41, py::arg("x_lo") = -2.0,
        py::arg("x_hi") = 2.0);

    m.attr("__version__") = "0.1.0";
}
