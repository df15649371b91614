#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdg/common.hpp"
#include "sdg/levy.hpp"

namespace sdg {

using json = nlohmann::ordered_json;

// Finite set of control points for one player.
struct ControlSet {
    std::vector<Vec> points;
    std::string label; // "U" or "V"

    int size() const { return static_cast<int>(points.size()); }
    const Vec& at(int i) const { return points[i]; }
    void validate() const;

    // uniform lattice on a box, helper for pre-gridding continuous sets
    static ControlSet grid(const Vec& lo, const Vec& hi, const std::vector<int>& counts,
                           std::string label);
};

// Game coefficients. Required shape:
//   drift        b(t, x, u, v)            -> R^n
//   diffusion    sigma(t, x, u, v)        -> R^{n x d}
//   jump         gamma(t, x, u, v, e)     -> R^n
//   driver       f(t, x, y, z, kbar, u, v)-> R, nondecreasing in kbar
//   terminal     phi(x)                   -> R
//   jump weight  l(x, e) in [0, C(1 ^ |e|)]
//   rho          dominating mark function for gamma
struct Coefficients {
    std::function<Vec(double, const Vec&, const Vec&, const Vec&)> drift;
    std::function<Mat(double, const Vec&, const Vec&, const Vec&)> sigma;
    std::function<Vec(double, const Vec&, const Vec&, const Vec&, const Vec&)> gamma;
    std::function<double(double, const Vec&, double, const Vec&, double, const Vec&, const Vec&)> driver;
    std::function<double(const Vec&)> terminal;
    std::function<double(const Vec&, const Vec&)> jump_weight;
    std::function<double(const Vec&)> rho;
    double lipschitz_C = 1.0;
    json family; // empty when built from in-process callables (not serializable)
};

struct ProblemSpec {
    std::string name;
    Coefficients coefficients;
    ControlSet u_set;
    ControlSet v_set;
    LevyMeasure levy;
    double horizon = 1.0;
    int state_dim = 1;
    int brownian_dim = 1;

    int n_atoms() const { return static_cast<int>(levy.atoms.size()); }
    void validate_dimensions() const;
};

// Random-probe configuration for the hypothesis validator.
struct ProbeConfig {
    int n_probes = 400;
    double x_radius = 5.0;
    double yzk_radius = 3.0;
    uint64_t seed = 20240917;
};

struct ClauseReport {
    std::string clause;
    double worst_ratio = 0.0;
    double threshold = 0.0;
    bool pass = true;
    std::string witness;
};

struct ValidationReport {
    std::vector<ClauseReport> clauses;
    bool all_pass() const {
        for (const auto& c : clauses)
            if (!c.pass) return false;
        return true;
    }
    json to_json() const;
};

ValidationReport validate_hypotheses(const ProblemSpec& spec, const ProbeConfig& probe = {});

// Problem files (schema v1, see docs/problem_v1.json). Unknown families and
// schema violations raise ParseError with a JSON pointer.
ProblemSpec parse_problem(const std::string& path);
ProblemSpec problem_from_json(const json& j);
json serialize_problem(const ProblemSpec& spec);

// Named closed-form scenarios, instantiable without a file.
std::vector<std::string> scenario_names();
ProblemSpec make_scenario(const std::string& name);

// Resolves either a registry name or a path to a JSON file.
ProblemSpec load_problem(const std::string& name_or_path);

} // namespace sdg
