#include "sdg/pide.hpp"

#include <algorithm>
#include <cmath>

namespace sdg {

namespace {

void require_1d(const ProblemSpec& spec, const StateGrid& sgrid, const char* where) {
    if (spec.state_dim != 1 || sgrid.dim() != 1)
        throw ConfigError(std::string(where) + ": the finite-difference scheme supports state_dim == 1");
}

double interp_with_margin(const StateGrid& sgrid, const Vec& field, double x, int atom_idx) {
    const Vec& ax = sgrid.axes[0];
    double width = ax.back() - ax.front();
    if (x < ax.front() - 0.5 * width || x > ax.back() + 0.5 * width)
        throw std::domain_error("hamiltonian: jump shift for atom " + std::to_string(atom_idx) +
                                " exits the extrapolation margin");
    return sgrid.interpolate(field, {x});
}

} // namespace

HamiltonianEval hamiltonian(const ProblemSpec& spec, const StateGrid& sgrid, const Vec& field, int node,
                            double t, const Vec& u, const Vec& v, double delta_j) {
    require_1d(spec, sgrid, "hamiltonian");
    const Vec& ax = sgrid.axes[0];
    const int n_nodes = static_cast<int>(ax.size());
    if (node <= 0 || node >= n_nodes - 1)
        throw std::domain_error("hamiltonian: node must be interior for central differences");
    const double h = ax[node + 1] - ax[node];
    const Vec x{ax[node]};
    const auto& co = spec.coefficients;

    const double psi = field[node];
    const double d_psi = (field[node + 1] - field[node - 1]) / (2.0 * h);
    const double d2_psi = (field[node + 1] - 2.0 * field[node] + field[node - 1]) / (h * h);

    HamiltonianEval ev;
    Mat sig = co.sigma(t, x, u, v);
    double sig2 = 0.0;
    for (int j = 0; j < sig.cols; ++j) sig2 += sig(0, j) * sig(0, j);
    ev.a_term = 0.5 * sig2 * d2_psi + d_psi * co.drift(t, x, u, v)[0];

    for (size_t a = 0; a < spec.levy.atoms.size(); ++a) {
        const auto& atom = spec.levy.atoms[a];
        double g = co.gamma(t, x, u, v, atom.mark)[0];
        double lw = co.jump_weight(x, atom.mark);
        if (norm2(atom.mark) < delta_j) {
            // small-jump split: second-order Taylor through the local
            // derivatives of the slice
            ev.b_nonlocal += atom.rate * 0.5 * g * g * d2_psi;
            ev.c_nonlocal += atom.rate * (d_psi * g + 0.5 * g * g * d2_psi) * lw;
        } else {
            double shifted = interp_with_margin(sgrid, field, ax[node] + g, static_cast<int>(a));
            ev.b_nonlocal += atom.rate * (shifted - psi - d_psi * g);
            ev.c_nonlocal += atom.rate * (shifted - psi) * lw;
        }
    }

    Vec z(spec.brownian_dim, 0.0);
    for (int j = 0; j < sig.cols; ++j) z[j] = d_psi * sig(0, j);
    ev.f_term = co.driver(t, x, psi, z, ev.c_nonlocal, u, v);
    ev.total = ev.a_term + ev.b_nonlocal + ev.f_term;
    return ev;
}

// ---------------------------------------------------------------------------
// monotone stepper
// ---------------------------------------------------------------------------

PideStepper::PideStepper(const ProblemSpec& spec, GameSide which, const StateGrid& sgrid, double dt,
                         double delta_j, double cfl_target)
    : spec_(spec), which_(which), sgrid_(sgrid), dt_(dt), delta_j_(delta_j), cfl_target_(cfl_target) {
    require_1d(spec, sgrid, "solve_pide");
    if (!(cfl_target > 0.0 && cfl_target <= 1.0))
        throw ConfigError("solve_pide: CFL target must be in (0, 1]");
    compute_cfl_and_mask();
}

void PideStepper::compute_cfl_and_mask() {
    const Vec& ax = sgrid_.axes[0];
    const int n_nodes = static_cast<int>(ax.size());
    const double h = sgrid_.min_spacing();
    const auto& co = spec_.coefficients;
    const double C = co.lipschitz_C;

    // probe whether the driver reads its z argument
    {
        Vec x{0.5 * (ax.front() + ax.back())};
        Vec z0(spec_.brownian_dim, 0.0), z1(spec_.brownian_dim, 1.0);
        for (int iu = 0; iu < spec_.u_set.size() && !driver_z_coupled_; ++iu)
            for (int iv = 0; iv < spec_.v_set.size() && !driver_z_coupled_; ++iv)
                if (std::fabs(co.driver(0.0, x, 0.3, z1, 0.1, spec_.u_set.at(iu), spec_.v_set.at(iv)) -
                              co.driver(0.0, x, 0.3, z0, 0.1, spec_.u_set.at(iu), spec_.v_set.at(iv))) >
                    1e-14)
                    driver_z_coupled_ = true;
    }

    double max_sig2 = 0.0, max_beff = 0.0, kappa_l = 0.0, min_sig_nonzero = 1e300;
    double lambda_total = spec_.levy.total_rate();
    for (int i = 0; i < n_nodes; ++i) {
        Vec x{ax[i]};
        for (int iu = 0; iu < spec_.u_set.size(); ++iu) {
            for (int iv = 0; iv < spec_.v_set.size(); ++iv) {
                const Vec& u = spec_.u_set.at(iu);
                const Vec& v = spec_.v_set.at(iv);
                Mat sig = co.sigma(0.0, x, u, v);
                double s2 = 0.0;
                for (int j = 0; j < sig.cols; ++j) s2 += sig(0, j) * sig(0, j);
                max_sig2 = std::max(max_sig2, s2);
                if (s2 > 0.0) min_sig_nonzero = std::min(min_sig_nonzero, std::sqrt(s2));
                double beff = co.drift(0.0, x, u, v)[0];
                double kl = 0.0;
                for (const auto& atom : spec_.levy.atoms) {
                    double g = co.gamma(0.0, x, u, v, atom.mark)[0];
                    if (norm2(atom.mark) >= delta_j_) beff -= atom.rate * g;
                    kl += atom.rate * std::fabs(co.jump_weight(x, atom.mark));
                }
                max_beff = std::max(max_beff, std::fabs(beff));
                kappa_l = std::max(kappa_l, kl);
            }
        }
    }
    cfl_ = dt_ * (max_sig2 / (h * h) + max_beff / h + lambda_total + C * (1.0 + kappa_l));
    if (cfl_ > cfl_target_ + 1e-12) {
        double rate = cfl_ / dt_;
        int required = static_cast<int>(std::ceil(rate / cfl_target_));
        throw ConfigError("solve_pide: CFL number " + format_double(cfl_) + " exceeds target " +
                          format_double(cfl_target_) + "; need >= " + std::to_string(required) +
                          " steps per unit time");
    }
    if (driver_z_coupled_ && min_sig_nonzero < 1e300 && min_sig_nonzero < C * h)
        throw ConfigError("solve_pide: z-coupled driver needs sigma >= C dx for a monotone stencil");

    // certified-monotone nodes: interior, all jump shifts inside the box
    mask_.assign(n_nodes, false);
    for (int i = 1; i + 1 < n_nodes; ++i) {
        Vec x{ax[i]};
        bool ok = true;
        for (int iu = 0; iu < spec_.u_set.size() && ok; ++iu) {
            for (int iv = 0; iv < spec_.v_set.size() && ok; ++iv) {
                for (const auto& atom : spec_.levy.atoms) {
                    if (norm2(atom.mark) < delta_j_) continue;
                    double g =
                        co.gamma(0.0, x, spec_.u_set.at(iu), spec_.v_set.at(iv), atom.mark)[0];
                    double target = ax[i] + g;
                    if (target < ax.front() || target > ax.back()) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        mask_[i] = ok;
    }
}

double PideStepper::node_hamiltonian(const Vec& psi, int i, double t, const Vec& u, const Vec& v) const {
    const Vec& ax = sgrid_.axes[0];
    const double h_up = ax[i + 1] - ax[i];
    const double h_dn = ax[i] - ax[i - 1];
    const Vec x{ax[i]};
    const auto& co = spec_.coefficients;

    Mat sig = co.sigma(t, x, u, v);
    double sig2 = 0.0;
    for (int j = 0; j < sig.cols; ++j) sig2 += sig(0, j) * sig(0, j);
    const double d2 = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (h_up * h_dn);
    const double d_central = (psi[i + 1] - psi[i - 1]) / (h_up + h_dn);

    // drift merged with the large-jump compensator, then upwound
    double beff = co.drift(t, x, u, v)[0];
    double jump_direct = 0.0;
    double c_nonlocal = 0.0;
    double small_b = 0.0;
    for (size_t a = 0; a < spec_.levy.atoms.size(); ++a) {
        const auto& atom = spec_.levy.atoms[a];
        double g = co.gamma(t, x, u, v, atom.mark)[0];
        double lw = co.jump_weight(x, atom.mark);
        if (norm2(atom.mark) < delta_j_) {
            small_b += atom.rate * 0.5 * g * g * d2;
            c_nonlocal += atom.rate * (d_central * g + 0.5 * g * g * d2) * lw;
        } else {
            beff -= atom.rate * g;
            double shifted = interp_with_margin(sgrid_, psi, ax[i] + g, static_cast<int>(a));
            jump_direct += atom.rate * (shifted - psi[i]);
            c_nonlocal += atom.rate * (shifted - psi[i]) * lw;
        }
    }
    double upwind = beff >= 0.0 ? beff * (psi[i + 1] - psi[i]) / h_up
                                : beff * (psi[i] - psi[i - 1]) / h_dn;

    Vec z(spec_.brownian_dim, 0.0);
    for (int j = 0; j < sig.cols; ++j) z[j] = d_central * sig(0, j);
    double f_term = co.driver(t, x, psi[i], z, c_nonlocal, u, v);
    return 0.5 * sig2 * d2 + upwind + jump_direct + small_b + f_term;
}

Vec PideStepper::step(const Vec& psi, double t) const {
    const Vec& ax = sgrid_.axes[0];
    const int n_nodes = static_cast<int>(ax.size());
    Vec out(n_nodes, 0.0);
    parallel_for(n_nodes - 2, [&](int q) {
        int i = q + 1;
        const Vec x{ax[i]};
        const int nu = spec_.u_set.size();
        const int nv = spec_.v_set.size();
        double best = 0.0;
        if (which_ == GameSide::Lower) {
            bool first_u = true;
            for (int iu = 0; iu < nu; ++iu) {
                double inner = 0.0;
                bool first_v = true;
                for (int iv = 0; iv < nv; ++iv) {
                    double hval = node_hamiltonian(psi, i, t, spec_.u_set.at(iu), spec_.v_set.at(iv));
                    if (first_v || hval < inner) {
                        inner = hval;
                        first_v = false;
                    }
                }
                if (first_u || inner > best) {
                    best = inner;
                    first_u = false;
                }
            }
        } else {
            bool first_v = true;
            for (int iv = 0; iv < nv; ++iv) {
                double inner = 0.0;
                bool first_u = true;
                for (int iu = 0; iu < nu; ++iu) {
                    double hval = node_hamiltonian(psi, i, t, spec_.u_set.at(iu), spec_.v_set.at(iv));
                    if (first_u || hval > inner) {
                        inner = hval;
                        first_u = false;
                    }
                }
                if (first_v || inner < best) {
                    best = inner;
                    first_v = false;
                }
            }
        }
        double v = psi[i] + dt_ * best;
        if (!std::isfinite(v))
            throw NumericalError("solve_pide: non-finite value at node " + std::to_string(i));
        out[i] = v;
    });
    // boundary by linear extrapolation from the interior
    out[0] = 2.0 * out[1] - out[2];
    out[n_nodes - 1] = 2.0 * out[n_nodes - 2] - out[n_nodes - 3];
    return out;
}

double PideStepper::minimax_gap(const Vec& psi, double t) const {
    const int n_nodes = static_cast<int>(sgrid_.axes[0].size());
    const int nu = spec_.u_set.size();
    const int nv = spec_.v_set.size();
    double worst = 0.0;
    std::vector<std::vector<double>> table(nu, std::vector<double>(nv));
    for (int i = 1; i + 1 < n_nodes; ++i) {
        for (int iu = 0; iu < nu; ++iu)
            for (int iv = 0; iv < nv; ++iv)
                table[iu][iv] = node_hamiltonian(psi, i, t, spec_.u_set.at(iu), spec_.v_set.at(iv));
        double maxmin = -std::numeric_limits<double>::infinity();
        for (int iu = 0; iu < nu; ++iu) {
            double inner = std::numeric_limits<double>::infinity();
            for (int iv = 0; iv < nv; ++iv) inner = std::min(inner, table[iu][iv]);
            maxmin = std::max(maxmin, inner);
        }
        double minmax = std::numeric_limits<double>::infinity();
        for (int iv = 0; iv < nv; ++iv) {
            double inner = -std::numeric_limits<double>::infinity();
            for (int iu = 0; iu < nu; ++iu) inner = std::max(inner, table[iu][iv]);
            minmax = std::min(minmax, inner);
        }
        worst = std::max(worst, std::fabs(maxmin - minmax));
    }
    return worst;
}

int PideStepper::required_steps(double t0, double horizon) const {
    double rate = cfl_ / dt_;
    return static_cast<int>(std::ceil((horizon - t0) * rate / cfl_target_));
}

PideSolution solve_pide(const ProblemSpec& spec, GameSide which, const TimeGrid& tgrid,
                        const StateGrid& sgrid, double delta_j, double cfl_target) {
    PideStepper stepper(spec, which, sgrid, tgrid.dt(), delta_j, cfl_target);
    const int n = tgrid.n_steps;
    const long nodes = sgrid.size();
    PideSolution sol;
    sol.which = which;
    sol.tgrid = tgrid;
    sol.sgrid = sgrid;
    sol.cfl_number = stepper.cfl_number();
    sol.values.assign(n + 1, Vec(nodes, 0.0));
    for (long i = 0; i < nodes; ++i) sol.values[n][i] = spec.coefficients.terminal(sgrid.node(i));
    for (int k = n - 1; k >= 0; --k) {
        sol.values[k] = stepper.step(sol.values[k + 1], tgrid.time(k));
        for (long i = 0; i < nodes; ++i)
            sol.max_step_increment =
                std::max(sol.max_step_increment, std::fabs(sol.values[k][i] - sol.values[k + 1][i]));
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Isaacs gap
// ---------------------------------------------------------------------------

json GapReport::to_json() const {
    return {{"max_gap", max_gap},
            {"mean_gap", mean_gap},
            {"argmax", {{"step", argmax_step}, {"node", argmax_node}, {"x", argmax_x}}}};
}

GapReport isaacs_gap(const ProblemSpec& spec, const TimeGrid& tgrid, const StateGrid& sgrid,
                     const std::vector<Vec>& probe_field, double delta_j) {
    require_1d(spec, sgrid, "isaacs_gap");
    GapReport rep;
    const int n_nodes = static_cast<int>(sgrid.axes[0].size());
    const int nu = spec.u_set.size();
    const int nv = spec.v_set.size();
    std::vector<int> step_samples = {0, tgrid.n_steps / 2, tgrid.n_steps - 1};
    double acc = 0.0;
    long count = 0;
    std::vector<std::vector<double>> table(nu, std::vector<double>(nv, 0.0));
    for (int k : step_samples) {
        if (k < 0 || k >= static_cast<int>(probe_field.size())) continue;
        const Vec& slice = probe_field[std::min<size_t>(k, probe_field.size() - 1)];
        for (int i = 1; i + 1 < n_nodes; ++i) {
            for (int iu = 0; iu < nu; ++iu)
                for (int iv = 0; iv < nv; ++iv)
                    table[iu][iv] = hamiltonian(spec, sgrid, slice, i, tgrid.time(k), spec.u_set.at(iu),
                                                spec.v_set.at(iv), delta_j)
                                        .total;
            double maxmin = -std::numeric_limits<double>::infinity();
            for (int iu = 0; iu < nu; ++iu) {
                double inner = std::numeric_limits<double>::infinity();
                for (int iv = 0; iv < nv; ++iv) inner = std::min(inner, table[iu][iv]);
                maxmin = std::max(maxmin, inner);
            }
            double minmax = std::numeric_limits<double>::infinity();
            for (int iv = 0; iv < nv; ++iv) {
                double inner = -std::numeric_limits<double>::infinity();
                for (int iu = 0; iu < nu; ++iu) inner = std::max(inner, table[iu][iv]);
                minmax = std::min(minmax, inner);
            }
            double gap = std::fabs(maxmin - minmax);
            acc += gap;
            ++count;
            if (gap > rep.max_gap) {
                rep.max_gap = gap;
                rep.argmax_step = k;
                rep.argmax_node = i;
                rep.argmax_x = sgrid.axes[0][i];
            }
        }
    }
    rep.mean_gap = count > 0 ? acc / count : 0.0;
    return rep;
}

} // namespace sdg
