#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nep/spectrum.hpp"

namespace nep {

/// Upper limit on enumerated compositions (or convolution products) in exact oracles.
inline constexpr double kMaxEnumeration = 1e7;

struct Atom {
    double value;    ///< per-symbol average
    double prob;
    double log_prob;
};

/// Exact law of the block average, atoms ascending by value.
struct SpectrumDistribution {
    std::vector<Atom> atoms;

    /// Pr{avg > threshold} for the right side, Pr{avg <= threshold} for the left.
    double tail(Side side, double threshold) const;
    double log_tail(Side side, double threshold) const;
};

/// Number of compositions of n into m parts, as a double.
double composition_count(std::int64_t n, std::size_t m);

SpectrumDistribution exact_distribution(const ValueSpectrum& spec, std::int64_t n);

/// Right: Pr{avg > mean + delta}. Left: Pr{avg <= mean - delta}.
double exact_tail(const ValueSpectrum& spec, Side side, double delta, std::int64_t n);

/// Law of the average over sum(counts) letters, counts[x] of them drawn from component x.
SpectrumDistribution exact_distribution_composite(const CompositeSpectrum& comp,
                                                  std::span<const std::int64_t> counts);

/// Tail of the composite average at an absolute threshold (same strictness as exact_tail).
double exact_tail_composite(const CompositeSpectrum& comp, std::span<const std::int64_t> counts,
                            Side side, double threshold);

/// Counter-based SplitMix64: output i is the i-th value of the SplitMix64 stream seeded by `seed`.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}
    std::uint64_t at(std::uint64_t index) const noexcept;
    /// (x >> 11) * 2^-53, in [0, 1).
    double uniform_at(std::uint64_t index) const noexcept;

private:
    std::uint64_t seed_;
};

struct McEstimate {
    double estimate;
    double ci_low;
    double ci_high;
    std::int64_t hits;
    std::int64_t samples;
};

/// Monte Carlo tail estimate with a Wilson 95% interval. Composite spectra need n t_x integral.
/// Worker count comes from NEP_THREADS (default: hardware concurrency); results do not depend on it.
McEstimate mc_tail(const CompositeSpectrum& spec, Side side, double delta, std::int64_t n,
                   std::int64_t samples, std::uint64_t seed);

/// Per-component counts n t_x; throws DomainError when they are not integers.
std::vector<std::int64_t> type_counts(const CompositeSpectrum& comp, std::int64_t n);

} // namespace nep
