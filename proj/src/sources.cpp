#include "nep/sources.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nep/errors.hpp"
#include "nep/numeric.hpp"
#include "nep/quadrature.hpp"

namespace nep {

namespace {

constexpr double kMassTol = 1e-12;

void check_mass(const std::vector<double>& v, const char* what) {
    CompensatedSum s;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw InvalidDistribution(std::string(what) + ": probabilities must be finite and >= 0");
        }
        s.add(x);
    }
    if (std::fabs(s.value() - 1.0) > kMassTol) {
        throw InvalidDistribution(std::string(what) + ": probabilities sum to " + std::to_string(s.value()));
    }
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

double binary_kl(double q, double p) {
    double d = 0.0;
    if (q > 0.0) d += q * std::log(q / p);
    if (q < 1.0) d += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
    return d;
}

} // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : alphabet_size_(probs.size()) {
    if (probs.empty()) throw InvalidDistribution("distribution is empty");
    check_mass(probs, "distribution");
    for (double p : probs) {
        if (p > 0.0) probs_.push_back(p);
    }
}

JointDistribution::JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> probs)
    : rows_(rows), cols_(cols), probs_(std::move(probs)) {
    if (rows_ == 0 || cols_ == 0 || probs_.size() != rows_ * cols_) {
        throw InvalidDistribution("joint distribution shape mismatch");
    }
    check_mass(probs_, "joint distribution");
}

JointDistribution JointDistribution::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidDistribution("joint distribution is empty");
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != rows.front().size()) throw InvalidDistribution("joint distribution rows differ in length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return JointDistribution(rows.size(), rows.front().size(), std::move(flat));
}

std::vector<double> JointDistribution::row_marginal() const {
    std::vector<double> m(rows_);
    for (std::size_t x = 0; x < rows_; ++x) {
        CompensatedSum s;
        for (std::size_t y = 0; y < cols_; ++y) s.add(at(x, y));
        m[x] = s.value();
    }
    return m;
}

std::vector<double> JointDistribution::col_marginal() const {
    std::vector<double> m(cols_);
    for (std::size_t y = 0; y < cols_; ++y) {
        CompensatedSum s;
        for (std::size_t x = 0; x < rows_; ++x) s.add(at(x, y));
        m[y] = s.value();
    }
    return m;
}

ValueSpectrum entropy_spectrum(const DiscreteDistribution& p) {
    std::vector<SpectrumEntry> e;
    e.reserve(p.size());
    for (double w : p.probs()) e.push_back({-std::log(w), w});
    return ValueSpectrum(std::move(e));
}

ValueSpectrum conditional_spectrum(const JointDistribution& j) {
    const auto py = j.col_marginal();
    for (double m : py) {
        if (m == 0.0) throw ZeroMarginal("conditional spectrum: an output symbol has zero probability");
    }
    std::vector<SpectrumEntry> e;
    for (std::size_t x = 0; x < j.rows(); ++x) {
        for (std::size_t y = 0; y < j.cols(); ++y) {
            const double pxy = j.at(x, y);
            if (pxy > 0.0) e.push_back({-std::log(pxy / py[y]), pxy});
        }
    }
    return ValueSpectrum(std::move(e));
}

ValueSpectrum mi_spectrum(const JointDistribution& j) {
    const auto px = j.row_marginal();
    const auto py = j.col_marginal();
    for (double m : py) {
        if (m == 0.0) throw ZeroMarginal("mutual-information spectrum: an output symbol has zero probability");
    }
    std::vector<SpectrumEntry> e;
    for (std::size_t x = 0; x < j.rows(); ++x) {
        for (std::size_t y = 0; y < j.cols(); ++y) {
            const double pxy = j.at(x, y);
            if (pxy > 0.0) e.push_back({std::log(pxy / px[x] / py[y]), pxy});
        }
    }
    return ValueSpectrum(std::move(e));
}

double BscClosedForms::rate(double delta) const {
    if (!(delta >= 0.0)) throw DeltaOutOfRange("delta must be non-negative");
    if (delta >= delta_star) return std::numeric_limits<double>::infinity();
    const double l = std::log((1.0 - p) / p);
    return binary_kl(p + delta / l, p);
}

BscClosedForms bsc_closed_forms(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("BSC crossover must lie in (0, 1)");
    if (p == 0.5) throw DomainError("BSC with p = 0.5 has zero information variance");
    const double q = std::min(p, 1.0 - p);
    const double l = std::log((1.0 - q) / q);
    return {q, q * (1.0 - q) * l * l, (1.0 - q) * l, -std::log(q)};
}

JointDistribution bsc_joint(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("BSC crossover must lie in [0, 1]");
    return JointDistribution(2, 2, {0.5 * (1.0 - p), 0.5 * p, 0.5 * p, 0.5 * (1.0 - p)});
}

ValueSpectrum bigc_spectrum(double sigma, int nodes) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("BIGC sigma must be positive");
    if (nodes < 16) throw DomainError("BIGC quadrature needs at least 16 nodes");
    const auto& rule = gauss_hermite(nodes);
    CompensatedSum total;
    for (double w : rule.weights) total.add(w);
    std::vector<SpectrumEntry> e;
    e.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = std::sqrt(2.0) * rule.nodes[i];
        e.push_back({softplus(-2.0 * (sigma * u + 1.0) / (sigma * sigma)), rule.weights[i] / total.value()});
    }
    return ValueSpectrum(std::move(e), true);
}

ValueSpectrum bigc_mi_spectrum(double sigma, int nodes) {
    const auto cond = bigc_spectrum(sigma, nodes);
    std::vector<SpectrumEntry> e;
    for (const auto& x : cond.entries()) e.push_back({std::log(2.0) - x.value, x.weight});
    return ValueSpectrum(std::move(e), true);
}

CompositeSpectrum divergence_composite(const DiscreteDistribution& t, const ChannelModel& ch) {
    const auto* fin = std::get_if<FiniteChannel>(&ch);
    if (fin == nullptr) throw FiniteChannelRequired("divergence spectrum with a type needs a finite channel");
    if (!t.full_support()) throw NotFullSupport("type must give every input symbol positive probability");
    const auto& rows = fin->rows;
    if (rows.size() != t.alphabet_size() || rows.empty()) {
        throw InvalidDistribution("channel row count does not match the type alphabet");
    }
    const std::size_t ny = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != ny) throw InvalidDistribution("channel rows differ in length");
        check_mass(r, "channel row");
    }
    std::vector<double> q(ny);
    for (std::size_t y = 0; y < ny; ++y) {
        CompensatedSum s;
        for (std::size_t x = 0; x < rows.size(); ++x) s.add(t.probs()[x] * rows[x][y]);
        q[y] = s.value();
    }
    std::vector<Component> comps;
    for (std::size_t x = 0; x < rows.size(); ++x) {
        std::vector<SpectrumEntry> e;
        for (std::size_t y = 0; y < ny; ++y) {
            if (rows[x][y] > 0.0) e.push_back({std::log(rows[x][y] / q[y]), rows[x][y]});
        }
        comps.push_back({t.probs()[x], ValueSpectrum(std::move(e))});
    }
    return CompositeSpectrum(std::move(comps));
}

} // namespace nep
