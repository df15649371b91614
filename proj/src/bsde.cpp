#include "sdg/bsde.hpp"

#include <algorithm>
#include <cmath>

#include "sdg/oracle.hpp"
#include "sdg/rng.hpp"

namespace sdg {

StepModel StepModel::build(const ProblemSpec& spec, double dt, int gauss_order) {
    if (!(dt > 0.0)) throw ConfigError("StepModel: dt must be > 0");
    const double total = spec.levy.total_rate();
    if (total * dt > 0.2 + 1e-12)
        throw ConfigError("StepModel: Lambda*dt = " + format_double(total * dt) +
                          " exceeds the 0.2 cap; increase n_steps");
    StepModel m;
    m.dt = dt;
    m.sqrt_dt = std::sqrt(dt);
    m.brownian_dim = spec.brownian_dim;
    GaussHermiteRule rule = gauss_hermite(gauss_order);

    const int d = spec.brownian_dim;
    const int n_atoms = spec.n_atoms();
    long gauss_points = 1;
    for (int j = 0; j < d; ++j) gauss_points *= gauss_order;

    for (long g = 0; g < gauss_points; ++g) {
        Vec xi(d);
        double w = 1.0;
        long rem = g;
        for (int j = d - 1; j >= 0; --j) {
            int idx = static_cast<int>(rem % gauss_order);
            rem /= gauss_order;
            xi[j] = rule.nodes[idx];
            w *= rule.weights[idx];
        }
        m.outcomes.push_back({w * (1.0 - total * dt), xi, -1});
        for (int a = 0; a < n_atoms; ++a)
            m.outcomes.push_back({w * spec.levy.atoms[a].rate * dt, xi, a});
    }
    return m;
}

Vec StepModel::advance(const ProblemSpec& spec, double s, const Vec& x, const Vec& u, const Vec& v,
                       const StepOutcome& o) const {
    std::vector<JumpEvent> jumps;
    if (o.atom >= 0) jumps.push_back({dt, o.atom});
    Vec db = sqrt_dt * o.xi;
    return euler_update(spec, s, x, u, v, dt, db, jumps);
}

OneStepValue backward_step(const ProblemSpec& spec, const StepModel& model, double s, const Vec& x,
                           const Vec& u, const Vec& v, const ScalarField& eta,
                           const ConditionalExpectationEngine& engine) {
    const auto& co = spec.coefficients;
    OneStepValue out;
    out.z.assign(spec.brownian_dim, 0.0);
    for (const StepOutcome& o : model.outcomes) {
        double val = eta(model.advance(spec, s, x, u, v, o));
        out.ybar += o.prob * val;
        for (int j = 0; j < spec.brownian_dim; ++j)
            out.z[j] += o.prob * val * model.sqrt_dt * o.xi[j] / model.dt;
    }
    const int n_atoms = spec.n_atoms();
    out.k_atoms.assign(n_atoms, 0.0);
    if (n_atoms > 0) {
        double eta_here = eta(x);
        for (int a = 0; a < n_atoms; ++a) {
            const auto& atom = spec.levy.atoms[a];
            Vec shifted = x + co.gamma(s, x, u, v, atom.mark);
            out.k_atoms[a] = eta(shifted) - eta_here;
            out.kbar += atom.rate * co.jump_weight(x, atom.mark) * out.k_atoms[a];
        }
    }
    // implicit driver step, contraction for dt * C < 1
    double y = out.ybar;
    bool converged = false;
    for (int it = 0; it < engine.max_fixed_point_iter; ++it) {
        double y_next = out.ybar + model.dt * co.driver(s, x, y, out.z, out.kbar, u, v);
        if (std::fabs(y_next - y) <= engine.fixed_point_tol * std::max(1.0, std::fabs(y_next))) {
            y = y_next;
            converged = true;
            break;
        }
        y = y_next;
    }
    if (!converged) throw NumericalError("backward_step: implicit driver step did not converge");
    check_finite(y, "backward_step");
    out.y = y;
    return out;
}

namespace {

void require_contraction(const ProblemSpec& spec, double dt) {
    if (dt * spec.coefficients.lipschitz_C >= 1.0)
        throw ConfigError("solver: dt * C = " + format_double(dt * spec.coefficients.lipschitz_C) +
                          " >= 1, refuse (increase n_steps)");
}

} // namespace

BsdeSolution solve_bsde(const ProblemSpec& spec, const TimeGrid& tgrid, const StateGrid& sgrid,
                        const UPolicy& u_policy, const VPolicy& v_policy, const ScalarField& terminal,
                        const ConditionalExpectationEngine& engine) {
    require_contraction(spec, tgrid.dt());
    const int n = tgrid.n_steps;
    const long nodes = sgrid.size();
    BsdeSolution sol;
    sol.tgrid = tgrid;
    sol.sgrid = sgrid;
    sol.y.assign(n + 1, Vec(nodes, 0.0));
    sol.z.assign(n, std::vector<Vec>(nodes, Vec(spec.brownian_dim, 0.0)));
    sol.k_bar.assign(n, Vec(nodes, 0.0));
    sol.k_atoms.assign(n, std::vector<Vec>(nodes, Vec(spec.n_atoms(), 0.0)));

    for (long i = 0; i < nodes; ++i) sol.y[n][i] = terminal(sgrid.node(i));

    if (engine.mode == EngineMode::TreeOracle) {
        if (tgrid.n_steps > 12 || spec.n_atoms() > 3)
            throw ConfigError("solve_bsde: tree mode is limited to 12 steps and 3 atoms");
        // exact recursion from every node; no interpolation anywhere
        TreeParams params;
        params.gauss_order = engine.gauss_order;
        params.fixed_point_tol = engine.fixed_point_tol;
        for (int k = n - 1; k >= 0; --k) {
            parallel_for(static_cast<int>(nodes), [&](int i) {
                Vec x = sgrid.node(i);
                StepModel model = StepModel::build(spec, tgrid.dt(), engine.gauss_order);
                auto cont = [&](const Vec& xx) {
                    return oracle_bsde_value(spec, tgrid, u_policy, v_policy, terminal, params, k + 1, xx);
                };
                int iu = u_policy(k, x);
                int iv = v_policy(k, x, iu);
                OneStepValue step = backward_step(spec, model, tgrid.time(k), x, spec.u_set.at(iu),
                                                  spec.v_set.at(iv), cont, engine);
                sol.y[k][i] = step.y;
                sol.z[k][i] = step.z;
                sol.k_bar[k][i] = step.kbar;
                sol.k_atoms[k][i] = step.k_atoms;
            });
        }
        return sol;
    }

    StepModel model = StepModel::build(spec, tgrid.dt(), engine.gauss_order);
    for (int k = n - 1; k >= 0; --k) {
        const Vec& next = sol.y[k + 1];
        ScalarField eta = [&](const Vec& x) { return sgrid.interpolate(next, x); };
        parallel_for(static_cast<int>(nodes), [&](int i) {
            Vec x = sgrid.node(i);
            int iu = u_policy(k, x);
            int iv = v_policy(k, x, iu);
            OneStepValue step = backward_step(spec, model, tgrid.time(k), x, spec.u_set.at(iu),
                                              spec.v_set.at(iv), eta, engine);
            sol.y[k][i] = step.y;
            sol.z[k][i] = step.z;
            sol.k_bar[k][i] = step.kbar;
            sol.k_atoms[k][i] = step.k_atoms;
        });
    }
    return sol;
}

Vec semigroup_apply(const ProblemSpec& spec, const TimeGrid& block, const StateGrid& sgrid,
                    const UPolicy& u_policy, const VPolicy& v_policy, const ScalarField& eta,
                    const ConditionalExpectationEngine& engine) {
    const long nodes = sgrid.size();
    if (block.n_steps == 0 || block.horizon == block.t0) {
        Vec out(nodes);
        for (long i = 0; i < nodes; ++i) out[i] = eta(sgrid.node(i));
        return out;
    }
    BsdeSolution sol = solve_bsde(spec, block, sgrid, u_policy, v_policy, eta, engine);
    return sol.y[0];
}

// ---------------------------------------------------------------------------
// comparison
// ---------------------------------------------------------------------------

json ComparisonReport::to_json() const {
    return {{"hypotheses_met", hypotheses_met},
            {"hypothesis_note", hypothesis_note},
            {"min_difference", min_difference},
            {"tolerance", tolerance},
            {"pass", pass}};
}

ComparisonReport comparison_check(const ProblemSpec& spec, const BsdeInstance& hi, const BsdeInstance& lo,
                                  const TimeGrid& tgrid, const UPolicy& u_policy, const VPolicy& v_policy,
                                  const ConditionalExpectationEngine& engine, uint64_t probe_seed) {
    ComparisonReport rep;

    // probe the ordering hypotheses: terminal ordering, driver ordering,
    // driver monotone in its jump argument
    CounterRng rng(probe_seed, 0, 0, 13);
    const int n = spec.state_dim;
    const int d = spec.brownian_dim;
    for (int i = 0; i < 200 && rep.hypotheses_met; ++i) {
        Vec x(n), z(d);
        for (double& c : x) c = 4.0 * (2.0 * rng.next_uniform() - 1.0);
        for (double& c : z) c = 2.0 * (2.0 * rng.next_uniform() - 1.0);
        double t = tgrid.t0 + (tgrid.horizon - tgrid.t0) * rng.next_uniform();
        double y = 2.0 * (2.0 * rng.next_uniform() - 1.0);
        double k = 2.0 * (2.0 * rng.next_uniform() - 1.0);
        double k2 = k + rng.next_uniform();
        const Vec& u = spec.u_set.at(0);
        const Vec& v = spec.v_set.at(0);
        if (hi.terminal(x) < lo.terminal(x) - 1e-12) {
            rep.hypotheses_met = false;
            rep.hypothesis_note = "terminal ordering violated";
        }
        if (hi.driver(t, x, y, z, k, u, v) < lo.driver(t, x, y, z, k, u, v) - 1e-12) {
            rep.hypotheses_met = false;
            rep.hypothesis_note = "driver ordering violated";
        }
        if (hi.driver(t, x, y, z, k2, u, v) < hi.driver(t, x, y, z, k, u, v) - 1e-12 ||
            lo.driver(t, x, y, z, k2, u, v) < lo.driver(t, x, y, z, k, u, v) - 1e-12) {
            rep.hypotheses_met = false;
            rep.hypothesis_note = "driver not nondecreasing in the jump argument";
        }
        for (const auto& atom : spec.levy.atoms) {
            double lv = spec.coefficients.jump_weight(x, atom.mark);
            double cap = spec.coefficients.lipschitz_C * std::min(1.0, norm2(atom.mark));
            if (lv < -1e-12 || lv > cap + 1e-9) {
                rep.hypotheses_met = false;
                rep.hypothesis_note = "jump weight outside [0, C(1 ^ |e|)]";
            }
        }
    }
    if (!rep.hypotheses_met) return rep;

    TreeParams params;
    params.gauss_order = engine.gauss_order;
    params.fixed_point_tol = engine.fixed_point_tol;
    Vec x0(spec.state_dim, 0.0);
    OracleSolution a = oracle_bsde_with(spec, hi, tgrid, u_policy, v_policy, params, x0, true);
    OracleSolution b = oracle_bsde_with(spec, lo, tgrid, u_policy, v_policy, params, x0, true);
    if (a.nodes.size() != b.nodes.size())
        throw NumericalError("comparison_check: outcome trees disagree in shape");
    double min_diff = a.root_y - b.root_y;
    for (size_t i = 0; i < a.nodes.size(); ++i)
        min_diff = std::min(min_diff, a.nodes[i].y - b.nodes[i].y);
    rep.min_difference = min_diff;
    rep.pass = min_diff >= -rep.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

json StabilityReport::to_json() const {
    return {{"beta", beta}, {"lhs", lhs}, {"rhs", rhs}, {"slack", slack}, {"pass", pass}};
}

StabilityReport stability_check(const ProblemSpec& spec, const ScalarField& terminal1,
                                const ScalarField& terminal2, const std::function<double(double)>& phi1,
                                const std::function<double(double)>& phi2, double beta,
                                const TimeGrid& tgrid, const UPolicy& u_policy, const VPolicy& v_policy,
                                const ConditionalExpectationEngine& engine) {
    const double C = spec.coefficients.lipschitz_C;
    const double beta_min = 2.0 + 2.0 * C + 4.0 * C * C;
    if (beta < beta_min - 1e-12)
        throw ConfigError("stability_check: beta = " + format_double(beta) + " below threshold " +
                          format_double(beta_min));

    auto wrap = [&](const std::function<double(double)>& phi) {
        BsdeInstance inst;
        inst.terminal = nullptr; // set below
        inst.driver = [phi, &spec](double t, const Vec& x, double y, const Vec& z, double k, const Vec& u,
                                   const Vec& v) {
            return spec.coefficients.driver(t, x, y, z, k, u, v) + phi(t);
        };
        return inst;
    };
    BsdeInstance i1 = wrap(phi1);
    i1.terminal = terminal1;
    BsdeInstance i2 = wrap(phi2);
    i2.terminal = terminal2;

    TreeParams params;
    params.gauss_order = engine.gauss_order;
    params.fixed_point_tol = engine.fixed_point_tol;
    Vec x0(spec.state_dim, 0.0);
    OracleSolution a = oracle_bsde_with(spec, i1, tgrid, u_policy, v_policy, params, x0, true);
    OracleSolution b = oracle_bsde_with(spec, i2, tgrid, u_policy, v_policy, params, x0, true);

    const double dt = tgrid.dt();
    const double t0 = tgrid.t0;
    const int n = tgrid.n_steps;

    double dy0 = a.root_y - b.root_y;
    double lhs = dy0 * dy0;
    double rhs = 0.0;

    // discrete integrals, left endpoints, expectation over realized nodes
    std::vector<double> depth_time(n + 1);
    for (int k = 0; k <= n; ++k) depth_time[k] = tgrid.time(k);

    double terminal_sq = 0.0;
    for (size_t i = 0; i < a.nodes.size(); ++i) {
        const OracleNode& na = a.nodes[i];
        const OracleNode& nb = b.nodes[i];
        if (na.depth == n) {
            double dterm = na.y - nb.y;
            terminal_sq += na.prob * dterm * dterm;
            continue;
        }
        double w = std::exp(beta * (depth_time[na.depth] - t0)) * na.prob * dt;
        double dy = na.y - nb.y;
        double dz2 = 0.0;
        for (size_t j = 0; j < na.z.size(); ++j) dz2 += (na.z[j] - nb.z[j]) * (na.z[j] - nb.z[j]);
        double dk2 = 0.0;
        for (size_t atom = 0; atom < na.k_atoms.size(); ++atom) {
            double dk = na.k_atoms[atom] - nb.k_atoms[atom];
            dk2 += spec.levy.atoms[atom].rate * dk * dk;
        }
        lhs += 0.5 * w * (dy * dy + dz2) + 0.5 * w * dk2;
        double dphi = phi1(depth_time[na.depth]) - phi2(depth_time[na.depth]);
        rhs += w * dphi * dphi;
    }
    rhs += std::exp(beta * (tgrid.horizon - t0)) * terminal_sq;

    StabilityReport rep;
    rep.beta = beta;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.slack = 10.0 * dt;
    rep.pass = lhs <= rhs * (1.0 + rep.slack) + 1e-14;
    return rep;
}

// ---------------------------------------------------------------------------
// random-initial-state identity
// ---------------------------------------------------------------------------

json MarkovReport::to_json() const {
    return {{"max_discrepancy", max_discrepancy},
            {"interpolation_bound", interpolation_bound},
            {"branch_values", branch_values},
            {"pointwise_values", pointwise_values}};
}

MarkovReport markov_identity_check(const ProblemSpec& spec, const std::vector<PartitionAtom>& partition,
                                   const TimeGrid& tgrid, const UPolicy& u_policy, const VPolicy& v_policy,
                                   const ConditionalExpectationEngine& engine, const StateGrid* sgrid) {
    if (partition.empty() || partition.size() > 4)
        throw ConfigError("markov_identity_check: partition must have 1..4 atoms");
    double psum = 0.0;
    for (const auto& a : partition) psum += a.prob;
    if (std::fabs(psum - 1.0) > 1e-12)
        throw ConfigError("markov_identity_check: partition probabilities must sum to 1");

    TreeParams params;
    params.gauss_order = engine.gauss_order;
    params.fixed_point_tol = engine.fixed_point_tol;
    const ScalarField terminal = spec.coefficients.terminal;

    MarkovReport rep;
    // mixture route: the pre-start branch carries no dynamics, the value on
    // branch i is the recursion started at (0, x_i); mixing happens only in
    // the (unused) scalar expectation, so per-branch values are exact
    for (const auto& atom : partition) {
        rep.branch_values.push_back(
            oracle_bsde_value(spec, tgrid, u_policy, v_policy, terminal, params, 0, atom.state));
    }
    // pointwise route
    if (engine.mode == EngineMode::TreeOracle || sgrid == nullptr) {
        for (const auto& atom : partition) {
            OracleSolution s =
                oracle_bsde(spec, tgrid, u_policy, v_policy, terminal, params, atom.state, false);
            rep.pointwise_values.push_back(s.root_y);
        }
    } else {
        BsdeSolution sol = solve_bsde(spec, tgrid, *sgrid, u_policy, v_policy, terminal, engine);
        for (const auto& atom : partition)
            rep.pointwise_values.push_back(sol.value_at(0, atom.state));
        // empirical multilinear interpolation error of the probe (terminal)
        // function near the partition states, with a stability factor
        Vec phi_nodes(sgrid->size());
        for (long i = 0; i < sgrid->size(); ++i) phi_nodes[i] = terminal(sgrid->node(i));
        double err = 0.0;
        for (const auto& atom : partition) {
            for (int trial = 0; trial < 64; ++trial) {
                Vec x = atom.state;
                CounterRng rng(99, trial, 0, 17);
                for (double& c : x) c += 0.5 * sgrid->min_spacing() * (2.0 * rng.next_uniform() - 1.0);
                err = std::max(err, std::fabs(terminal(x) - sgrid->interpolate(phi_nodes, x)));
            }
        }
        rep.interpolation_bound = 10.0 * std::max(err, 1e-12);
    }
    for (size_t i = 0; i < partition.size(); ++i)
        rep.max_discrepancy =
            std::max(rep.max_discrepancy, std::fabs(rep.branch_values[i] - rep.pointwise_values[i]));
    return rep;
}

} // namespace sdg
