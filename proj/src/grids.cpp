#include "sdg/grids.hpp"

#include <algorithm>
#include <cmath>

namespace sdg {

TimeGrid::TimeGrid(double t0_, double horizon_, int n_steps_)
    : t0(t0_), horizon(horizon_), n_steps(n_steps_) {
    if (n_steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
    if (!(t0 < horizon)) throw ConfigError("TimeGrid: need t0 < T");
    nodes.resize(n_steps + 1);
    double d = (horizon - t0) / n_steps;
    for (int k = 0; k <= n_steps; ++k) nodes[k] = t0 + k * d;
    nodes[n_steps] = horizon;
}

TimeGrid TimeGrid::restrict_steps(int k_lo, int k_hi) const {
    if (k_lo < 0 || k_hi > n_steps || k_lo >= k_hi)
        throw ConfigError("TimeGrid::restrict_steps: bad split indices");
    TimeGrid g;
    g.t0 = nodes[k_lo];
    g.horizon = nodes[k_hi];
    g.n_steps = k_hi - k_lo;
    g.nodes.assign(nodes.begin() + k_lo, nodes.begin() + k_hi + 1);
    return g;
}

StateGrid::StateGrid(std::vector<Vec> axes_) : axes(std::move(axes_)) {
    for (const Vec& ax : axes) {
        if (ax.size() < 2) throw ConfigError("StateGrid: each axis needs >= 2 nodes");
        for (size_t i = 1; i < ax.size(); ++i)
            if (!(ax[i] > ax[i - 1])) throw ConfigError("StateGrid: axis nodes must be strictly increasing");
    }
}

StateGrid StateGrid::uniform(const Vec& lo, const Vec& hi, const std::vector<int>& n_nodes) {
    if (lo.size() != hi.size() || lo.size() != n_nodes.size())
        throw ConfigError("StateGrid::uniform: dimension mismatch");
    std::vector<Vec> axes(lo.size());
    for (size_t d = 0; d < lo.size(); ++d) {
        int n = n_nodes[d];
        if (n < 2) throw ConfigError("StateGrid::uniform: need >= 2 nodes per axis");
        if (!(lo[d] < hi[d])) throw ConfigError("StateGrid::uniform: need lo < hi");
        axes[d].resize(n);
        for (int i = 0; i < n; ++i) axes[d][i] = lo[d] + (hi[d] - lo[d]) * i / (n - 1);
        axes[d][n - 1] = hi[d];
    }
    return StateGrid(std::move(axes));
}

long StateGrid::size() const {
    long s = 1;
    for (const Vec& ax : axes) s *= static_cast<long>(ax.size());
    return s;
}

long StateGrid::flat_index(const std::vector<int>& idx) const {
    long f = 0;
    for (size_t d = 0; d < axes.size(); ++d) f = f * static_cast<long>(axes[d].size()) + idx[d];
    return f;
}

std::vector<int> StateGrid::unflatten(long flat) const {
    std::vector<int> idx(axes.size());
    for (int d = dim() - 1; d >= 0; --d) {
        long n = static_cast<long>(axes[d].size());
        idx[d] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

Vec StateGrid::node(long flat) const {
    std::vector<int> idx = unflatten(flat);
    Vec x(axes.size());
    for (size_t d = 0; d < axes.size(); ++d) x[d] = axes[d][idx[d]];
    return x;
}

double StateGrid::interpolate(std::span<const double> field, const Vec& x) const {
    const int n = dim();
    // cell index and barycentric coordinate per axis; theta is left unclamped,
    // which turns the edge cell into a linear extrapolation outside the box
    std::vector<int> cell(n);
    Vec theta(n);
    for (int d = 0; d < n; ++d) {
        const Vec& ax = axes[d];
        auto it = std::upper_bound(ax.begin(), ax.end(), x[d]);
        int i = static_cast<int>(it - ax.begin()) - 1;
        i = std::clamp(i, 0, static_cast<int>(ax.size()) - 2);
        cell[d] = i;
        theta[d] = (x[d] - ax[i]) / (ax[i + 1] - ax[i]);
    }
    double value = 0.0;
    const int corners = 1 << n;
    std::vector<int> idx(n);
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            bool hi = (c >> d) & 1;
            idx[d] = cell[d] + (hi ? 1 : 0);
            w *= hi ? theta[d] : (1.0 - theta[d]);
        }
        value += w * field[flat_index(idx)];
    }
    return value;
}

bool StateGrid::strictly_inside(const Vec& x, double margin) const {
    for (int d = 0; d < dim(); ++d) {
        if (x[d] - margin < axes[d].front() || x[d] + margin > axes[d].back()) return false;
    }
    return true;
}

double StateGrid::min_spacing() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Vec& ax : axes)
        for (size_t i = 1; i < ax.size(); ++i) m = std::min(m, ax[i] - ax[i - 1]);
    return m;
}

} // namespace sdg
