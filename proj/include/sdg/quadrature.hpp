#pragma once

#include <vector>

#include "sdg/common.hpp"

namespace sdg {

// Nodes/weights such that E[f(Z)] ~= sum_i w_i f(z_i) for Z standard normal.
// Weights are positive and normalized to sum to one.
struct GaussHermiteRule {
    Vec nodes;
    Vec weights;
};

GaussHermiteRule gauss_hermite(int order);

} // namespace sdg
