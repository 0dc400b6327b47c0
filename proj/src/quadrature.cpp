#include "nep/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "nep/errors.hpp"

namespace nep {

namespace {

// Orthonormal Hermite p_n(x) and p_n'(x), sharing an arbitrary positive scale factor,
// plus ln sum_{k<n} p_k(x)^2 (unscaled).
struct HermiteEval {
    double value;
    double deriv;
    double log_christoffel;
};

HermiteEval hermite(int n, double x) {
    double p_prev = 0.0;
    double p = std::pow(M_PI, -0.25);
    double sum_sq = 0.0;
    double log_scale = 0.0; // true values = stored * e^{log_scale}
    for (int k = 0; k < n; ++k) {
        sum_sq += p * p;
        const double next = (x * p - std::sqrt(k / 2.0) * p_prev) / std::sqrt((k + 1) / 2.0);
        p_prev = p;
        p = next;
        if (std::fabs(p) > 1e100) {
            p *= 1e-100;
            p_prev *= 1e-100;
            sum_sq *= 1e-200;
            log_scale += 100.0 * std::log(10.0);
        }
    }
    return {p, std::sqrt(2.0 * n) * p_prev, std::log(sum_sq) + 2.0 * log_scale};
}

GaussHermiteRule build(int n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(n - 1);
    for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);

    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = solver.eigenvalues()(i);
        for (int it = 0; it < 3; ++it) {
            const auto h = hermite(n, x);
            if (h.deriv == 0.0) break;
            x -= h.value / h.deriv;
        }
        rule.nodes[i] = x;
        // Christoffel number; eigenvector-based weights lose relative accuracy in the tails.
        rule.weights[i] = std::exp(-hermite(n, x).log_christoffel);
    }
    return rule;
}

} // namespace

const GaussHermiteRule& gauss_hermite(int nodes) {
    if (nodes < 2) throw DomainError("Gauss-Hermite rule needs at least 2 nodes");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[nodes];
    if (!slot) slot = std::make_unique<GaussHermiteRule>(build(nodes));
    return *slot;
}

} // namespace nep
