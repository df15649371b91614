#include "sdg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdg {

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials:
// diagonal 0, off-diagonal sqrt(k). Eigenvalues are the nodes, squared first
// eigenvector components the weights. The QL sweep below is the standard
// implicit-shift iteration for symmetric tridiagonal matrices.
static void tridiag_eigen(Vec& d, Vec& e, Vec& first_row) {
    const int n = static_cast<int>(d.size());
    e.push_back(0.0);
    first_row.assign(n, 0.0);
    std::vector<Vec> z(n, Vec(n, 0.0));
    for (int i = 0; i < n; ++i) z[i][i] = 1.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 + 1e-16 * dd) break;
            }
            if (m != l) {
                if (++iter == 60) throw NumericalError("gauss_hermite: eigen iteration stalled");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[k][i + 1];
                        z[k][i + 1] = s * z[k][i] + c * f;
                        z[k][i] = c * z[k][i] - s * f;
                    }
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    for (int i = 0; i < n; ++i) first_row[i] = z[0][i];

    // sort ascending by node
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
    Vec ds(n), fs(n);
    for (int i = 0; i < n; ++i) {
        ds[i] = d[order[i]];
        fs[i] = first_row[order[i]];
    }
    d = ds;
    first_row = fs;
}

GaussHermiteRule gauss_hermite(int order) {
    if (order < 1 || order > 64) throw ConfigError("gauss_hermite: order must be in [1, 64]");
    if (order == 1) return {{0.0}, {1.0}};
    Vec diag(order, 0.0), off(order - 1);
    for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
    Vec first;
    tridiag_eigen(diag, off, first);
    GaussHermiteRule rule;
    rule.nodes = diag;
    rule.weights.resize(order);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) {
        rule.weights[i] = first[i] * first[i];
        sum += rule.weights[i];
    }
    for (double& w : rule.weights) w /= sum;
    // symmetrize: pair nodes +/-x exactly so symmetric integrands cancel clean
    for (int i = 0; i < order / 2; ++i) {
        int j = order - 1 - i;
        double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = rule.weights[j] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

} // namespace sdg
