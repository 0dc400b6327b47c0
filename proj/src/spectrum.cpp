#include "nep/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nep/errors.hpp"
#include "nep/numeric.hpp"

namespace nep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMergeRel = 1e-13;
constexpr double kMassTol = 1e-12;

double sign_of(Side side) { return side == Side::right ? 1.0 : -1.0; }

// Statistics of one component tilted by theta, all taken relative to the untilted mean m:
// log_z = ln E e^{theta (V - m)}, centered_mean = E_theta[V] - m.
struct ComponentEval {
    double log_z;
    double centered_mean;
    double var;
    double m3;
};

ComponentEval evaluate(const ValueSpectrum& s, double theta) {
    const auto entries = s.entries();
    const double m = s.mean();
    if (entries.size() == 1) return {0.0, 0.0, 0.0, 0.0};

    double top = -kInf;
    for (const auto& e : entries) top = std::max(top, theta * (e.value - m));

    std::vector<double> scaled(entries.size());
    CompensatedSum z;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        scaled[i] = entries[i].weight * std::exp(theta * (entries[i].value - m) - top);
        z.add(scaled[i]);
    }
    const double zv = z.value();

    CompensatedSum mu;
    for (std::size_t i = 0; i < entries.size(); ++i) mu.add(scaled[i] / zv * (entries[i].value - m));
    const double c = mu.value();

    CompensatedSum v2, v3;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const double pi = scaled[i] / zv;
        const double d = std::fabs(entries[i].value - m - c);
        v2.add(pi * d * d);
        v3.add(pi * d * d * d);
    }
    return {top + std::log(zv), c, v2.value(), v3.value()};
}

// Composite evaluation along the orientation `sgn`: the oriented variable is sgn * V.
struct OrientedEval {
    double log_z; // K_o(lambda) - lambda * mean_o
    double shift; // K_o'(lambda) - mean_o
    double sigma2;
    double m3;
};

OrientedEval evaluate(const CompositeSpectrum& spec, double sgn, double lambda) {
    CompensatedSum lz, sh, s2, s3;
    for (const auto& c : spec.components()) {
        const auto e = evaluate(c.spectrum, sgn * lambda);
        lz.add(c.t_weight * e.log_z);
        sh.add(c.t_weight * e.centered_mean);
        s2.add(c.t_weight * e.var);
        s3.add(c.t_weight * e.m3);
    }
    return {lz.value(), sgn * sh.value(), s2.value(), s3.value()};
}

void require_nondegenerate(const CompositeSpectrum& spec) {
    if (spec.degenerate()) {
        throw DegenerateSpectrum("spectrum has zero variance (every component is single-valued)");
    }
}

} // namespace

ValueSpectrum::ValueSpectrum(std::vector<SpectrumEntry> entries, bool truncated)
    : truncated_(truncated) {
    if (entries.empty()) throw InvalidDistribution("spectrum needs at least one entry");
    CompensatedSum total;
    for (const auto& e : entries) {
        if (!std::isfinite(e.value)) throw InvalidDistribution("spectrum value is not finite");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw InvalidDistribution("spectrum weight must be positive and finite");
        }
        total.add(e.weight);
    }
    if (std::fabs(total.value() - 1.0) > kMassTol) {
        throw InvalidDistribution("spectrum weights sum to " + std::to_string(total.value()));
    }

    std::stable_sort(entries.begin(), entries.end(),
                     [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.value < b.value; });

    std::size_t i = 0;
    while (i < entries.size()) {
        const double first = entries[i].value;
        CompensatedSum w, wv;
        bool identical = true;
        std::size_t j = i;
        while (j < entries.size()) {
            const double v = entries[j].value;
            const double scale = std::max({1.0, std::fabs(v), std::fabs(first)});
            if (std::fabs(v - first) > kMergeRel * scale) break;
            identical = identical && v == first;
            w.add(entries[j].weight);
            wv.add(entries[j].weight * v);
            ++j;
        }
        const double value = identical ? first : wv.value() / w.value();
        entries_.push_back({value, w.value()});
        i = j;
    }

    const double norm = total.value();
    CompensatedSum mean;
    for (auto& e : entries_) {
        e.weight /= norm;
        mean.add(e.weight * e.value);
    }
    mean_ = entries_.size() == 1 ? entries_.front().value : mean.value();
    if (entries_.size() == 1) entries_.front().weight = 1.0;
}

ValueSpectrum ValueSpectrum::negated() const {
    ValueSpectrum out = *this;
    std::reverse(out.entries_.begin(), out.entries_.end());
    for (auto& e : out.entries_) e.value = -e.value;
    out.mean_ = -mean_;
    return out;
}

ValueSpectrum ValueSpectrum::tilted(double theta) const {
    double top = -kInf;
    for (const auto& e : entries_) top = std::max(top, theta * (e.value - mean_));
    std::vector<SpectrumEntry> out;
    CompensatedSum z;
    for (const auto& e : entries_) {
        const double w = e.weight * std::exp(theta * (e.value - mean_) - top);
        if (w > 0.0) {
            out.push_back({e.value, w});
            z.add(w);
        }
    }
    for (auto& e : out) e.weight /= z.value();
    return ValueSpectrum(std::move(out), truncated_);
}

bool operator==(const ValueSpectrum& a, const ValueSpectrum& b) noexcept {
    if (a.truncated_ != b.truncated_ || a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        if (a.entries_[i].value != b.entries_[i].value || a.entries_[i].weight != b.entries_[i].weight) {
            return false;
        }
    }
    return true;
}

CompositeSpectrum::CompositeSpectrum(ValueSpectrum single)
    : CompositeSpectrum(std::vector<Component>{{1.0, std::move(single)}}) {}

CompositeSpectrum::CompositeSpectrum(std::vector<Component> components) {
    if (components.empty()) throw InvalidDistribution("composite spectrum needs a component");
    CompensatedSum total;
    for (const auto& c : components) {
        if (!(c.t_weight > 0.0) || !std::isfinite(c.t_weight)) {
            throw InvalidDistribution("type weights must be positive");
        }
        total.add(c.t_weight);
    }
    if (std::fabs(total.value() - 1.0) > kMassTol) {
        throw InvalidDistribution("type weights sum to " + std::to_string(total.value()));
    }

    // Identical components collapse so that a repeated spectrum reproduces the single path exactly.
    for (auto& c : components) {
        auto it = std::find_if(components_.begin(), components_.end(),
                               [&](const Component& k) { return k.spectrum == c.spectrum; });
        if (it == components_.end()) {
            components_.push_back(std::move(c));
        } else {
            it->t_weight += c.t_weight;
        }
    }
    if (components_.size() == 1) {
        components_.front().t_weight = 1.0;
        mean_ = components_.front().spectrum.mean();
        return;
    }
    CompensatedSum t_sum;
    for (const auto& c : components_) t_sum.add(c.t_weight);
    CompensatedSum mean;
    for (auto& c : components_) {
        c.t_weight /= t_sum.value();
        mean.add(c.t_weight * c.spectrum.mean());
    }
    mean_ = mean.value();
}

bool CompositeSpectrum::degenerate() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](const Component& c) { return c.spectrum.degenerate(); });
}

bool CompositeSpectrum::truncated() const noexcept {
    return std::any_of(components_.begin(), components_.end(),
                       [](const Component& c) { return c.spectrum.truncated(); });
}

CompositeSpectrum CompositeSpectrum::negated() const {
    CompositeSpectrum out = *this;
    for (auto& c : out.components_) c.spectrum = c.spectrum.negated();
    out.mean_ = -mean_;
    return out;
}

CompositeSpectrum CompositeSpectrum::tilted(double theta) const {
    std::vector<Component> comps;
    comps.reserve(components_.size());
    for (const auto& c : components_) comps.push_back({c.t_weight, c.spectrum.tilted(theta)});
    return CompositeSpectrum(std::move(comps));
}

double cgf(const CompositeSpectrum& spec, double theta) {
    CompensatedSum k;
    for (const auto& c : spec.components()) {
        const auto entries = c.spectrum.entries();
        double top = -kInf;
        for (const auto& e : entries) top = std::max(top, theta * e.value);
        CompensatedSum z;
        for (const auto& e : entries) z.add(e.weight * std::exp(theta * e.value - top));
        k.add(c.t_weight * (top + std::log(z.value())));
    }
    return k.value();
}

TiltedStats tilted_stats(const CompositeSpectrum& spec, double theta) {
    require_nondegenerate(spec);
    const auto e = evaluate(spec, 1.0, theta);
    return {e.shift, e.sigma2, e.m3};
}

DomainLimits domain_limits(const CompositeSpectrum& spec, Side side) {
    CompensatedSum gap;
    for (const auto& c : spec.components()) {
        const auto& s = c.spectrum;
        gap.add(c.t_weight * (side == Side::right ? s.max_value() - s.mean() : s.mean() - s.min_value()));
    }
    return {kInf, gap.value(), spec.truncated()};
}

double log_extreme_weight(const CompositeSpectrum& spec, Side side) {
    CompensatedSum acc;
    for (const auto& c : spec.components()) {
        const auto entries = c.spectrum.entries();
        const double w = side == Side::right ? entries.back().weight : entries.front().weight;
        acc.add(c.t_weight * std::log(w));
    }
    return acc.value();
}

RatePoint rate_at(const CompositeSpectrum& spec, Side side, double delta) {
    require_nondegenerate(spec);
    if (!(delta >= 0.0)) throw DeltaOutOfRange("delta must be non-negative");
    const double dstar = domain_limits(spec, side).delta_star;
    if (delta >= dstar) {
        throw DeltaOutOfRange("delta " + std::to_string(delta) + " is not below delta_star " +
                              std::to_string(dstar));
    }
    const double sgn = sign_of(side);
    if (delta == 0.0) {
        const auto e = evaluate(spec, sgn, 0.0);
        return {0.0, side, 0.0, 0.0, e.sigma2, e.m3};
    }

    const double tol = 1e-12 * std::max(1.0, delta);
    double lo = 0.0;
    double hi = 1.0;
    OrientedEval at = evaluate(spec, sgn, hi);
    while (at.shift < delta) {
        lo = hi;
        hi *= 2.0;
        if (hi > 0x1p200) throw DeltaOutOfRange("delta is numerically indistinguishable from delta_star");
        at = evaluate(spec, sgn, hi);
    }

    double lambda = hi;
    for (int it = 0; it < 300; ++it) {
        const double g = at.shift - delta;
        if (std::fabs(g) <= tol) break;
        if (g < 0.0) lo = lambda; else hi = lambda;
        double next = lambda - g / at.sigma2;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (hi - lo <= 2 * std::numeric_limits<double>::epsilon() * hi) break;
        lambda = next;
        at = evaluate(spec, sgn, lambda);
    }
    const double rate = std::max(0.0, lambda * delta - at.log_z);
    return {lambda, side, delta, rate, at.sigma2, at.m3};
}

std::vector<RatePoint> rate_curve(const CompositeSpectrum& spec, Side side,
                                  std::span<const double> lambda_grid) {
    require_nondegenerate(spec);
    const double sgn = sign_of(side);
    std::vector<RatePoint> out;
    out.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda grid values must be finite and >= 0");
        const auto e = evaluate(spec, sgn, lambda);
        const double delta = lambda == 0.0 ? 0.0 : std::max(0.0, e.shift);
        const double rate = lambda == 0.0 ? 0.0 : std::max(0.0, lambda * delta - e.log_z);
        out.push_back({lambda, side, delta, rate, e.sigma2, e.m3});
    }
    return out;
}

} // namespace nep
