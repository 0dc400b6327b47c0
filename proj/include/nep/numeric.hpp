#pragma once

#include <cmath>
#include <span>

namespace nep {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640562;

/// ln(sum exp(x_i)); returns -inf for an empty range or all -inf inputs.
double log_sum_exp(std::span<const double> xs) noexcept;

/// ln(e^a + e^b).
double log_add(double a, double b) noexcept;

/// Standard normal upper tail Q(t) = P{N(0,1) > t}.
double q_function(double t) noexcept;

/// ln Q(t), accurate for arbitrarily large positive t.
double log_q(double t) noexcept;

/// Mills ratio Q(t) / phi(t) for t >= 0.
double mills_ratio(double t) noexcept;

/// e^{a^2/2} Q(a + b) evaluated without forming either factor separately.
/// Requires a >= 0 and b >= 0; b may be +inf.
double scaled_q(double a, double b) noexcept;

/// Inverse of Q on (0, 1). Throws DomainError outside the open interval.
double q_inverse(double p);

} // namespace nep
