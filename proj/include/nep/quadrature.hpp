#pragma once

#include <vector>

namespace nep {

/// Nodes and weights for integrals against e^{-x^2}; nodes ascending.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch rule, Newton-polished, cached per node count. Thread-safe.
const GaussHermiteRule& gauss_hermite(int nodes);

} // namespace nep
