#pragma once

#include <cstdint>
#include <optional>

#include "nep/bounds.hpp"
#include "nep/sources.hpp"

namespace nep {

struct UpperRate {
    double rate = 0.0;       ///< H + delta_bar, nats/symbol
    double delta_bar = 0.0;
    bool at_entropy = false; ///< epsilon already met as delta -> 0
    bool point_mass = false; ///< bound never reaches epsilon below delta_star; rate = max value
    bool monotone = true;    ///< coarse-grid check of the bound map
};

struct LowerRate {
    double rate = 0.0;
    double delta_under = 0.0;
    double d_used = 0.0;
    bool vacuous = false;    ///< no admissible delta or d; rate reported as 0
};

struct CodingBracket {
    std::int64_t n = 1;
    double epsilon = 0.0;
    double rate_upper = 0.0;
    double rate_lower = 0.0;
    double delta_bar = 0.0;
    double delta_under = 0.0;
    double d_used = 0.0;
    std::optional<double> exact_rate;
    bool upper_at_entropy = false;
    bool upper_point_mass = false;
    bool lower_vacuous = false;
};

UpperRate rate_upper(const DiscreteDistribution& p, double epsilon, std::int64_t n,
                     const BoundOptions& opts = {});

LowerRate rate_lower(const DiscreteDistribution& p, double epsilon, std::int64_t n,
                     const BoundOptions& opts = {});

/// Both sides, plus the exact optimal rate when `with_exact` and enumeration is feasible.
CodingBracket coding_bracket(const DiscreteDistribution& p, double epsilon, std::int64_t n,
                             bool with_exact = true, const BoundOptions& opts = {});

enum class Regime { a, b, c, d };

struct RegimeParams {
    double epsilon = 0.1;          ///< regime d
    double log_epsilon = 0.0;      ///< regime a: ln epsilon_n (may be very negative)
    double alpha = 0.5;            ///< regimes b and c
    double berry_constant = 0.56;  ///< regime d upper side
};

struct GapPair {
    double gap_upper;
    double gap_lower;
};

/// Leading-order excess rate (rate minus entropy) in each asymptotic regime.
GapPair asymptotic_gap(Regime regime, const DiscreteDistribution& p, const RegimeParams& params,
                       std::int64_t n);

/// Inverse of the right rate function: the delta with r(delta) = x (0 for x <= 0).
double rate_inverse(const CompositeSpectrum& spec, double x);

/// Error of the best code with floor(e^{n rate}) codewords.
double optimal_code_error(const DiscreteDistribution& p, double rate_nats, std::int64_t n);

/// Exact minimum rate (1/n) ln |S| with error <= epsilon.
double optimal_rate(const DiscreteDistribution& p, double epsilon, std::int64_t n);

} // namespace nep
