#include "nep/numeric.hpp"

#include <algorithm>
#include <limits>

#include "nep/errors.hpp"

namespace nep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Above this argument ln Q switches from erfc to the Mills-ratio fraction.
constexpr double kTailSwitch = 8.0;

} // namespace

double log_sum_exp(std::span<const double> xs) noexcept {
    double hi = -kInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == -kInf) return -kInf;
    if (hi == kInf) return kInf;
    CompensatedSum s;
    for (double x : xs) s.add(std::exp(x - hi));
    return hi + std::log(s.value());
}

double log_add(double a, double b) noexcept {
    if (a < b) std::swap(a, b);
    if (b == -kInf) return a;
    return a + std::log1p(std::exp(b - a));
}

double q_function(double t) noexcept { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

double mills_ratio(double t) noexcept {
    if (t < kTailSwitch) {
        return std::exp(std::log(q_function(t)) + 0.5 * t * t + kLnSqrt2Pi);
    }
    // R(t) = 1 / (t + 1/(t + 2/(t + 3/(t + ...)))), modified Lentz.
    constexpr double tiny = 1e-300;
    double f = t;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        d = t + k * d;
        if (d == 0.0) d = tiny;
        d = 1.0 / d;
        c = t + k / c;
        if (c == 0.0) c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

double log_q(double t) noexcept {
    if (t == kInf) return -kInf;
    if (t < kTailSwitch) return std::log(q_function(t));
    return -0.5 * t * t - kLnSqrt2Pi + std::log(mills_ratio(t));
}

double scaled_q(double a, double b) noexcept {
    if (b == kInf) return 0.0;
    const double s = a + b;
    if (s > kTailSwitch) {
        return std::exp(-a * b - 0.5 * b * b - kLnSqrt2Pi + std::log(mills_ratio(s)));
    }
    return std::exp(0.5 * a * a + log_q(s));
}

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("q_inverse: argument must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -q_inverse(1.0 - p);

    // Solve ln Q(t) = ln p on t > 0. ln Q is decreasing; Q(t) <= e^{-t^2/2}/2 gives the bracket.
    const double target = std::log(p);
    double lo = 0.0;
    double hi = std::sqrt(-2.0 * target);
    double t = std::max(0.5 * hi, hi - 1.0);
    for (int it = 0; it < 200; ++it) {
        const double f = log_q(t) - target;
        if (f > 0.0) lo = t; else hi = t;
        if (f == 0.0) return t;
        // d/dt ln Q = -1/R(t)
        double next = t + f * mills_ratio(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) <= 1e-15 * std::max(1.0, t)) return next;
        t = next;
        if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
    }
    return t;
}

} // namespace nep
