#pragma once

#include <span>
#include <vector>

#include "sdg/common.hpp"

namespace sdg {

// Uniform time grid t0 = s_0 < ... < s_n = T.
struct TimeGrid {
    double t0 = 0.0;
    double horizon = 1.0;
    int n_steps = 1;
    Vec nodes;

    TimeGrid() = default;
    TimeGrid(double t0_, double horizon_, int n_steps_);

    double dt() const { return (horizon - t0) / n_steps; }
    double time(int k) const { return nodes[k]; }

    // Sub-grid [nodes[k_lo], nodes[k_hi]] reusing the same spacing.
    TimeGrid restrict_steps(int k_lo, int k_hi) const;
};

// Rectangular grid on a box, multilinear interpolation inside, linear
// extrapolation from the edge cell outside.
struct StateGrid {
    std::vector<Vec> axes; // per-dimension strictly increasing nodes

    StateGrid() = default;
    explicit StateGrid(std::vector<Vec> axes_);
    static StateGrid uniform(const Vec& lo, const Vec& hi, const std::vector<int>& n_nodes);

    int dim() const { return static_cast<int>(axes.size()); }
    long size() const;
    long flat_index(const std::vector<int>& idx) const;
    std::vector<int> unflatten(long flat) const;
    Vec node(long flat) const;

    double interpolate(std::span<const double> field, const Vec& x) const;

    // true when x (plus optional reach) is far enough from the box edge that
    // every interpolation weight used for it is nonnegative
    bool strictly_inside(const Vec& x, double margin = 0.0) const;

    double min_spacing() const;
};

} // namespace sdg
