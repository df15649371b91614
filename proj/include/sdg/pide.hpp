#pragma once

#include "sdg/game.hpp"

namespace sdg {

// One Hamiltonian evaluation at (t, x, u, v). The nonlocal weight term is
// folded into the driver's jump slot, so total = a_term + b_nonlocal + f_term.
struct HamiltonianEval {
    double a_term = 0.0;     // (1/2) tr(sigma sigma^T D2) + D . b
    double b_nonlocal = 0.0; // compensated jump part
    double c_nonlocal = 0.0; // weight-composed jump part, consumed by the driver
    double f_term = 0.0;
    double total = 0.0;
};

// Central-difference assembly on a one-dimensional field slice. Atoms with
// |e| < delta_j are handled by the second-order Taylor split, the rest by
// direct evaluation through interpolation.
HamiltonianEval hamiltonian(const ProblemSpec& spec, const StateGrid& sgrid, const Vec& field, int node,
                            double t, const Vec& u, const Vec& v, double delta_j = 0.0);

struct PideSolution {
    GameSide which = GameSide::Lower;
    TimeGrid tgrid;
    StateGrid sgrid;
    std::vector<Vec> values; // [n_steps+1][nodes]
    double cfl_number = 0.0;
    double max_step_increment = 0.0;

    double at(int step, const Vec& x) const { return sgrid.interpolate(values[step], x); }
};

// Explicit monotone one-step operator (upwound drift, direct jumps), shared
// by the solver and the property tests.
class PideStepper {
  public:
    PideStepper(const ProblemSpec& spec, GameSide which, const StateGrid& sgrid, double dt,
                double delta_j, double cfl_target);

    Vec step(const Vec& psi, double t) const;

    // max over interior nodes of |max-min - min-max| of this scheme's own
    // node Hamiltonian (the upwound one the solver integrates)
    double minimax_gap(const Vec& psi, double t) const;

    // nodes where every stencil weight is provably nonnegative (interior,
    // jump shifts inside the box)
    const std::vector<bool>& monotone_mask() const { return mask_; }
    double cfl_number() const { return cfl_; }
    int required_steps(double t0, double horizon) const;

  private:
    const ProblemSpec& spec_;
    GameSide which_;
    StateGrid sgrid_;
    double dt_;
    double delta_j_;
    double cfl_target_;
    double cfl_ = 0.0;
    std::vector<bool> mask_;
    bool driver_z_coupled_ = false;

    double node_hamiltonian(const Vec& psi, int i, double t, const Vec& u, const Vec& v) const;
    void compute_cfl_and_mask();
};

PideSolution solve_pide(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                        const StateGrid& sgrid, double delta_j = 0.0, double cfl_target = 0.9);

struct GapReport {
    double max_gap = 0.0;
    double mean_gap = 0.0;
    int argmax_step = 0;
    long argmax_node = 0;
    double argmax_x = 0.0;
    json to_json() const;
};

// |sup_u inf_v H - inf_v sup_u H| over sampled steps and interior nodes of a
// probe field (typically the solved lower field).
GapReport isaacs_gap(const ProblemSpec& spec, const TimeGrid& tgrid, const StateGrid& sgrid,
                     const std::vector<Vec>& probe_field, double delta_j = 0.0);

} // namespace sdg
