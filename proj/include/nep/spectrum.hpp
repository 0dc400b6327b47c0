#pragma once

#include <span>
#include <vector>

namespace nep {

enum class Side { right, left };

struct SpectrumEntry {
    double value;  ///< information value in nats
    double weight; ///< probability of the value
};

/**
 * Finite weighted set of per-symbol information values.
 *
 * Construction sorts by value, merges values equal to within 1e-13 relative
 * and renormalizes the weights with compensated summation.
 */
class ValueSpectrum {
public:
    explicit ValueSpectrum(std::vector<SpectrumEntry> entries, bool truncated = false);

    std::span<const SpectrumEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    double mean() const noexcept { return mean_; }
    double min_value() const noexcept { return entries_.front().value; }
    double max_value() const noexcept { return entries_.back().value; }
    bool degenerate() const noexcept { return entries_.size() == 1; }
    /// True when the spectrum discretizes a continuous law whose extreme values are unbounded.
    bool truncated() const noexcept { return truncated_; }

    ValueSpectrum negated() const;
    /// Weights w_i e^{theta v_i} / Z. Entries whose tilted weight underflows are dropped.
    ValueSpectrum tilted(double theta) const;

    friend bool operator==(const ValueSpectrum& a, const ValueSpectrum& b) noexcept;

private:
    std::vector<SpectrumEntry> entries_;
    double mean_ = 0.0;
    bool truncated_ = false;
};

struct Component {
    double t_weight;
    ValueSpectrum spectrum;
};

/// Type-weighted list of per-letter spectra. A single component behaves exactly like its spectrum.
class CompositeSpectrum {
public:
    CompositeSpectrum(ValueSpectrum single); // NOLINT: implicit on purpose
    explicit CompositeSpectrum(std::vector<Component> components);

    std::span<const Component> components() const noexcept { return components_; }
    double mean() const noexcept { return mean_; }
    bool degenerate() const noexcept;
    bool truncated() const noexcept;

    CompositeSpectrum negated() const;
    CompositeSpectrum tilted(double theta) const;

private:
    std::vector<Component> components_;
    double mean_ = 0.0;
};

struct TiltedStats {
    double shift;  ///< K'(theta) - mean
    double sigma2; ///< sum_x t_x K''_x(theta)
    double m3;     ///< sum_x t_x E_tilt |V - K'_x(theta)|^3
};

struct RatePoint {
    double lambda = 0.0;
    Side side = Side::right;
    double delta = 0.0;
    double rate = 0.0;
    double sigma2 = 0.0;
    double m3 = 0.0;
};

struct DomainLimits {
    double lambda_star;
    double delta_star;
    bool truncated = false; ///< delta_star is a finite stand-in for an infinite limit
};

double cgf(const CompositeSpectrum& spec, double theta);

/// Throws DegenerateSpectrum when every component is single-valued.
TiltedStats tilted_stats(const CompositeSpectrum& spec, double theta);

/// Solves the tilt equation for delta in [0, delta_star).
RatePoint rate_at(const CompositeSpectrum& spec, Side side, double delta);

DomainLimits domain_limits(const CompositeSpectrum& spec, Side side);

std::vector<RatePoint> rate_curve(const CompositeSpectrum& spec, Side side,
                                  std::span<const double> lambda_grid);

/// ln of the probability that a single block hits the extreme value on `side` in every position,
/// normalized per symbol: sum_x t_x ln w_ext,x.
double log_extreme_weight(const CompositeSpectrum& spec, Side side);

} // namespace nep
