#pragma once

#include <functional>
#include <optional>

#include "sdg/forward.hpp"
#include "sdg/quadrature.hpp"

namespace sdg {

// How conditional expectations are realized.
enum class EngineMode { QuadratureGrid, TreeOracle };

struct ConditionalExpectationEngine {
    EngineMode mode = EngineMode::QuadratureGrid;
    int gauss_order = 5;
    double fixed_point_tol = 1e-13;
    int max_fixed_point_iter = 50;
};

// Enumerated one-step noise: Gauss-Hermite nodes tensored over the Brownian
// dimensions, crossed with the 0-or-1-jump alternatives (no jump with
// probability 1 - Lambda dt, atom i with probability rate_i dt). Requires
// Lambda dt <= 0.2. Shared by the grid solvers and the tree oracle so that
// both evaluate the same finite sum.
struct StepOutcome {
    double prob;
    Vec xi;   // standardized normal draw per Brownian dim
    int atom; // -1 = no jump
};

struct StepModel {
    double dt = 0.0;
    double sqrt_dt = 0.0;
    int brownian_dim = 1;
    std::vector<StepOutcome> outcomes;

    static StepModel build(const ProblemSpec& spec, double dt, int gauss_order);

    Vec advance(const ProblemSpec& spec, double s, const Vec& x, const Vec& u, const Vec& v,
                const StepOutcome& o) const;
};

struct OneStepValue {
    double y = 0.0;    // implicit driver step applied
    double ybar = 0.0; // plain conditional expectation of eta at the next step
    Vec z;             // E[eta(X') dB] / dt
    double kbar = 0.0; // sum_i rate_i l(x, e_i) (eta(x + gamma_i) - eta(x))
    Vec k_atoms;       // eta(x + gamma_i) - eta(x) per atom
};

using ScalarField = std::function<double(const Vec&)>;

OneStepValue backward_step(const ProblemSpec& spec, const StepModel& model, double s, const Vec& x,
                           const Vec& u, const Vec& v, const ScalarField& eta,
                           const ConditionalExpectationEngine& engine);

// Discrete (Y, Z, Kbar) fields on a time x state grid.
struct BsdeSolution {
    TimeGrid tgrid;
    StateGrid sgrid;
    std::vector<Vec> y;                    // [n_steps+1][nodes]
    std::vector<std::vector<Vec>> z;       // [n_steps][nodes][d]
    std::vector<Vec> k_bar;                // [n_steps][nodes]
    std::vector<std::vector<Vec>> k_atoms; // [n_steps][nodes][atoms]

    double value_at(int step, const Vec& x) const { return sgrid.interpolate(y[step], x); }
};

BsdeSolution solve_bsde(const ProblemSpec& spec, const TimeGrid& tgrid, const StateGrid& sgrid,
                        const UPolicy& u_policy, const VPolicy& v_policy, const ScalarField& terminal,
                        const ConditionalExpectationEngine& engine);

// Block value operator: starts from a terminal datum at the end of `block`
// and returns the field at the block start. Satisfies the flow identity
// (two adjacent blocks compose to the single block).
Vec semigroup_apply(const ProblemSpec& spec, const TimeGrid& block, const StateGrid& sgrid,
                    const UPolicy& u_policy, const VPolicy& v_policy, const ScalarField& eta,
                    const ConditionalExpectationEngine& engine);

// --- property harnesses -----------------------------------------------------

// A driver perturbation / replacement pair for the ordering and stability
// checks: same dynamics, possibly different terminal and driver.
struct BsdeInstance {
    ScalarField terminal;
    std::function<double(double, const Vec&, double, const Vec&, double, const Vec&, const Vec&)> driver;
};

struct ComparisonReport {
    bool hypotheses_met = true;
    std::string hypothesis_note;
    double min_difference = 0.0; // min over (step, node) of y - y'
    double tolerance = 1e-10;
    bool pass = false;
    json to_json() const;
};

ComparisonReport comparison_check(const ProblemSpec& spec, const BsdeInstance& hi, const BsdeInstance& lo,
                                  const TimeGrid& tgrid, const UPolicy& u_policy, const VPolicy& v_policy,
                                  const ConditionalExpectationEngine& engine, uint64_t probe_seed = 1);

struct StabilityReport {
    double beta = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
    json to_json() const;
};

// Shared driver, perturbations phi_i(s); terminal pair (Phi1, Phi2).
StabilityReport stability_check(const ProblemSpec& spec, const ScalarField& terminal1,
                                const ScalarField& terminal2, const std::function<double(double)>& phi1,
                                const std::function<double(double)>& phi2, double beta,
                                const TimeGrid& tgrid, const UPolicy& u_policy, const VPolicy& v_policy,
                                const ConditionalExpectationEngine& engine);

struct MarkovReport {
    double max_discrepancy = 0.0;
    double interpolation_bound = 0.0; // only meaningful in grid mode
    std::vector<double> branch_values;
    std::vector<double> pointwise_values;
    json to_json() const;
};

// Random initial state: value x_i on pre-start event A_i with P(A_i) = p_i.
struct PartitionAtom {
    double prob;
    Vec state;
};

MarkovReport markov_identity_check(const ProblemSpec& spec, const std::vector<PartitionAtom>& partition,
                                   const TimeGrid& tgrid, const UPolicy& u_policy, const VPolicy& v_policy,
                                   const ConditionalExpectationEngine& engine,
                                   const StateGrid* sgrid = nullptr);

} // namespace sdg
