#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "nep/spectrum.hpp"

namespace nep {

/// Probability vector over a finite alphabet. Zero-probability symbols are stripped;
/// `alphabet_size()` remembers how many symbols were supplied.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<double> probs);

    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    bool full_support() const noexcept { return probs_.size() == alphabet_size_; }

private:
    std::vector<double> probs_;
    std::size_t alphabet_size_;
};

/// p(x, y) stored row-major, rows indexed by x.
class JointDistribution {
public:
    JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> probs);
    static JointDistribution from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double at(std::size_t x, std::size_t y) const noexcept { return probs_[x * cols_ + y]; }
    std::vector<double> row_marginal() const;
    std::vector<double> col_marginal() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> probs_;
};

struct FiniteChannel {
    std::vector<std::vector<double>> rows; ///< rows[x][y] = p(y|x)
};

struct BinaryInputGaussian {
    double sigma;
    int nodes = 128;
};

using ChannelModel = std::variant<FiniteChannel, BinaryInputGaussian>;

ValueSpectrum entropy_spectrum(const DiscreteDistribution& p);
ValueSpectrum conditional_spectrum(const JointDistribution& j);
ValueSpectrum mi_spectrum(const JointDistribution& j);

struct BscClosedForms {
    double p;
    double sigma2;
    double delta_star;
    double r_max;
    /// D(p + delta/L || p) with L = ln((1-p)/p); +inf at or beyond delta_star.
    double rate(double delta) const;
};

BscClosedForms bsc_closed_forms(double p);

/// Uniform-input binary symmetric channel joint.
JointDistribution bsc_joint(double p);

/// Conditional-entropy spectrum of the binary-input Gaussian channel, discretized by
/// Gauss-Hermite quadrature. Flagged as truncated: the true extremes are unbounded.
ValueSpectrum bigc_spectrum(double sigma, int nodes = 128);

/// ln 2 minus the conditional value, pointwise (uniform input).
ValueSpectrum bigc_mi_spectrum(double sigma, int nodes = 128);

CompositeSpectrum divergence_composite(const DiscreteDistribution& t, const ChannelModel& ch);

} // namespace nep
