#include "nep/coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nep/errors.hpp"
#include "nep/numeric.hpp"
#include "nep/oracle.hpp"

namespace nep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Above e^kExactLog codeword counts are treated as continuous (floor/ceil are irrelevant).
constexpr double kExactLog = 50.0;

void check_epsilon(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw EpsilonOutOfRange("epsilon must lie in (0, 1)");
}

// Delta grid as fractions of delta_star, dense near both ends.
std::vector<double> delta_grid(double dstar) {
    std::vector<double> g;
    for (double f : {1e-9, 1e-7, 1e-5, 1e-4, 1e-3, 3e-3, 1e-2}) g.push_back(f * dstar);
    for (int k = 1; k < 64; ++k) g.push_back(dstar * k / 64.0);
    for (double f : {1e-3, 1e-5, 1e-7}) g.push_back((1.0 - f) * dstar);
    return g;
}

double strong_log(const CompositeSpectrum& spec, double delta, std::int64_t n, const BoundOptions& o,
                  bool upper) {
    try {
        const auto b = strong_tail_bounds(spec, Side::right, delta, n, o);
        return upper ? b.log_upper : b.log_lower;
    } catch (const DeltaOutOfRange&) {
        return upper ? 0.0 : -kInf;
    }
}

// Round values that are integers up to accumulated log-domain noise.
double snap(double x) {
    const double r = std::round(x);
    return std::fabs(x - r) <= 1e-9 * std::max(1.0, r) ? r : x;
}

struct TypeClass {
    double log_count;
    double log_pseq;
    std::size_t index;
};

// Type classes over the distinct probabilities, sorted by per-sequence probability descending.
std::vector<TypeClass> sorted_classes(const DiscreteDistribution& p, std::int64_t n) {
    if (n < 1) throw DomainError("block length n must be >= 1");
    std::vector<double> probs = p.probs();
    std::sort(probs.begin(), probs.end(), std::greater<>());
    std::vector<double> level;
    std::vector<double> mult;
    for (double q : probs) {
        if (!level.empty() && level.back() == q) {
            mult.back() += 1.0;
        } else {
            level.push_back(q);
            mult.push_back(1.0);
        }
    }
    const std::size_t g = level.size();
    const double count = composition_count(n, g);
    if (count > kMaxEnumeration * (1.0 + 1e-9)) {
        throw TooLarge("optimal code needs " + std::to_string(count) + " type classes");
    }
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) log_fact[k] = std::lgamma(static_cast<double>(k) + 1.0);

    std::vector<TypeClass> classes;
    classes.reserve(static_cast<std::size_t>(count) + 1);
    std::vector<std::int64_t> k(g, 0);
    k[0] = n;
    while (true) {
        double lc = log_fact[n];
        double lp = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            if (k[i] == 0) continue;
            const double kd = static_cast<double>(k[i]);
            lc += kd * std::log(mult[i]) - log_fact[k[i]];
            lp += kd * std::log(level[i]);
        }
        classes.push_back({lc, lp, classes.size()});
        if (g == 1) break;
        std::size_t i = 0;
        while (i + 1 < g && k[i] == 0) ++i;
        if (i + 1 >= g) break;
        const std::int64_t v = k[i];
        k[i] = 0;
        k[0] = v - 1;
        k[i + 1] += 1;
    }
    std::sort(classes.begin(), classes.end(), [](const TypeClass& a, const TypeClass& b) {
        if (a.log_pseq != b.log_pseq) return a.log_pseq > b.log_pseq;
        return a.index < b.index;
    });
    return classes;
}

} // namespace

UpperRate rate_upper(const DiscreteDistribution& p, double epsilon, std::int64_t n, const BoundOptions& opts) {
    check_epsilon(epsilon);
    const CompositeSpectrum spec(entropy_spectrum(p));
    if (spec.degenerate()) throw DegenerateSpectrum("source has zero information variance");
    const double h = spec.mean();
    const double dstar = domain_limits(spec, Side::right).delta_star;
    const double target = std::log(epsilon);

    const auto grid = delta_grid(dstar);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = strong_log(spec, grid[i], n, opts, true);

    UpperRate out;
    for (std::size_t i = 1; i < vals.size(); ++i) {
        if (vals[i] > vals[i - 1] + 1e-12 * std::max(1.0, std::fabs(vals[i - 1]))) out.monotone = false;
    }
    if (vals.front() <= target) {
        out.at_entropy = true;
        out.rate = h;
        return out;
    }
    std::size_t k = 0;
    while (k < vals.size() && vals[k] > target) ++k;
    if (k == vals.size()) {
        out.point_mass = true;
        out.delta_bar = dstar;
        out.rate = h + dstar;
        return out;
    }
    // First crossing; refine keeping the side where the bound is already <= epsilon.
    double lo = grid[k - 1];
    double hi = grid[k];
    for (int it = 0; it < 200 && hi - lo > 1e-14 * dstar; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (strong_log(spec, mid, n, opts, true) <= target) hi = mid; else lo = mid;
    }
    out.delta_bar = hi;
    out.rate = h + hi;
    return out;
}

LowerRate rate_lower(const DiscreteDistribution& p, double epsilon, std::int64_t n, const BoundOptions& opts) {
    check_epsilon(epsilon);
    const CompositeSpectrum spec(entropy_spectrum(p));
    if (spec.degenerate()) throw DegenerateSpectrum("source has zero information variance");
    const double h = spec.mean();
    const double dstar = domain_limits(spec, Side::right).delta_star;
    const double nd = static_cast<double>(n);
    const double target = std::log(epsilon) + std::log1p(std::exp(-nd));

    const auto grid = delta_grid(dstar);
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (strong_log(spec, grid[i], n, opts, false) >= target) best = static_cast<std::ptrdiff_t>(i);
    }
    LowerRate out;
    if (best < 0) {
        out.vacuous = true;
        return out;
    }
    double lo = grid[best];
    if (static_cast<std::size_t>(best) + 1 < grid.size()) {
        double hi = grid[best + 1];
        for (int it = 0; it < 200 && hi - lo > 1e-14 * dstar; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (strong_log(spec, mid, n, opts, false) >= target) lo = mid; else hi = mid;
        }
    }
    out.delta_under = lo;

    const auto pt = rate_at(spec, Side::right, lo);
    const double sigma = std::sqrt(pt.sigma2);
    const double s = std::sqrt(nd) * sigma;
    const double beta = opts.berry_constant * pt.m3 / (std::sqrt(nd) * sigma * sigma * sigma);
    const double gamma = 0.5 - 2.0 * beta;
    if (gamma <= 0.0) {
        out.vacuous = true;
        return out;
    }
    const double d_min = s * q_inverse(gamma);
    const double d_max = std::max(10.0 * s, d_min + s);
    auto f = [&](double d) {
        const double arg = gamma - q_function(d / s);
        return arg > 0.0 ? -d + std::log(arg) : -kInf;
    };
    // Golden-section search; f is concave on (d_min, d_max).
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = d_min;
    double b = d_max;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-10 * std::max(1.0, d_max)) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double d_best = fc >= fd ? c : d;
    const double f_best = std::max(fc, fd);
    if (!std::isfinite(f_best)) {
        out.vacuous = true;
        return out;
    }
    out.d_used = d_best;
    out.rate = h + lo - pt.rate + f_best / nd;
    return out;
}

CodingBracket coding_bracket(const DiscreteDistribution& p, double epsilon, std::int64_t n, bool with_exact,
                             const BoundOptions& opts) {
    const auto up = rate_upper(p, epsilon, n, opts);
    const auto lo = rate_lower(p, epsilon, n, opts);
    CodingBracket b;
    b.n = n;
    b.epsilon = epsilon;
    b.rate_upper = up.rate;
    b.rate_lower = lo.rate;
    b.delta_bar = up.delta_bar;
    b.delta_under = lo.delta_under;
    b.d_used = lo.d_used;
    b.upper_at_entropy = up.at_entropy;
    b.upper_point_mass = up.point_mass;
    b.lower_vacuous = lo.vacuous;
    if (with_exact) {
        try {
            b.exact_rate = optimal_rate(p, epsilon, n);
        } catch (const TooLarge&) {
        }
    }
    return b;
}

double rate_inverse(const CompositeSpectrum& spec, double x) {
    if (x <= 0.0) return 0.0;
    const double r_max = -log_extreme_weight(spec, Side::right);
    if (x >= r_max) throw ParamOutOfRange("rate target is at or beyond the maximal rate");
    const double dstar = domain_limits(spec, Side::right).delta_star;
    double lo = 0.0;
    double hi = dstar;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * dstar; ++it) {
        const double mid = 0.5 * (lo + hi);
        double r;
        try {
            r = rate_at(spec, Side::right, mid).rate;
        } catch (const DeltaOutOfRange&) {
            r = r_max;
        }
        if (r < x) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

GapPair asymptotic_gap(Regime regime, const DiscreteDistribution& p, const RegimeParams& params, std::int64_t n) {
    if (n < 2) throw ParamOutOfRange("asymptotic regimes need n >= 2");
    const CompositeSpectrum spec(entropy_spectrum(p));
    const auto st = tilted_stats(spec, 0.0);
    const double sigma = std::sqrt(st.sigma2);
    const double nd = static_cast<double>(n);
    switch (regime) {
    case Regime::a: {
        if (!(params.log_epsilon < 0.0)) throw ParamOutOfRange("regime a needs ln epsilon_n < 0");
        const double g = rate_inverse(spec, -params.log_epsilon / nd - std::log(nd) / (2.0 * nd));
        return {g, g + params.log_epsilon / nd};
    }
    case Regime::b: {
        if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw ParamOutOfRange("regime b needs alpha in (0, 1)");
        const double g = std::sqrt(2.0) * sigma * std::pow(nd, -(1.0 - params.alpha) / 2.0);
        return {g, g};
    }
    case Regime::c: {
        if (!(params.alpha > 0.0)) throw ParamOutOfRange("regime c needs alpha > 0");
        const double g = sigma * std::sqrt(2.0 * params.alpha * std::log(nd) / nd);
        return {g, g};
    }
    case Regime::d: {
        const double eps = params.epsilon;
        if (!(eps > 0.0 && eps < 1.0)) throw ParamOutOfRange("regime d needs epsilon in (0, 1)");
        const double beta = params.berry_constant * st.m3 / (std::sqrt(nd) * sigma * st.sigma2);
        const double shifted = eps - beta;
        const double up = shifted > 0.0 ? sigma / std::sqrt(nd) * q_inverse(shifted) : kInf;
        return {up, sigma / std::sqrt(nd) * q_inverse(eps)};
    }
    }
    throw ParamOutOfRange("unknown regime");
}

double optimal_code_error(const DiscreteDistribution& p, double rate_nats, std::int64_t n) {
    if (!(rate_nats >= 0.0)) throw DomainError("rate must be non-negative");
    const auto classes = sorted_classes(p, n);
    const double log_s_raw = static_cast<double>(n) * rate_nats;
    // |S| = floor(e^{n rate}) in log form.
    double rem_log = log_s_raw < kExactLog ? std::log(std::floor(snap(std::exp(log_s_raw)))) : log_s_raw;

    CompensatedSum uncovered;
    for (const auto& c : classes) {
        if (rem_log == -kInf) {
            uncovered.add(std::exp(c.log_count + c.log_pseq));
            continue;
        }
        const double slack = 1e-12 * std::max(1.0, std::fabs(c.log_count));
        if (rem_log >= c.log_count - slack) {
            rem_log = rem_log <= c.log_count + slack ? -kInf
                                                     : rem_log + std::log1p(-std::exp(c.log_count - rem_log));
            if (rem_log < kExactLog && rem_log != -kInf) {
                const double r = snap(std::exp(rem_log));
                rem_log = r >= 1.0 ? std::log(std::floor(r)) : -kInf;
            }
            continue;
        }
        // Partial class: floor(remaining) sequences fit.
        double m_log = rem_log;
        if (m_log < kExactLog) {
            const double m = std::floor(snap(std::exp(m_log)));
            m_log = m >= 1.0 ? std::log(m) : -kInf;
        }
        uncovered.add(std::exp(c.log_pseq + c.log_count + std::log1p(-std::exp(m_log - c.log_count))));
        rem_log = -kInf;
    }
    return std::clamp(uncovered.value(), 0.0, 1.0);
}

double optimal_rate(const DiscreteDistribution& p, double epsilon, std::int64_t n) {
    if (!(epsilon > 0.0)) throw EpsilonOutOfRange("epsilon must be positive");
    if (epsilon >= 1.0) return 0.0;
    const auto classes = sorted_classes(p, n);
    const std::size_t k_total = classes.size();
    // suffix[k] = probability of classes k.. (uncovered once classes < k are in S)
    std::vector<double> suffix(k_total + 1, 0.0);
    {
        CompensatedSum s;
        for (std::size_t k = k_total; k-- > 0;) {
            s.add(std::exp(classes[k].log_count + classes[k].log_pseq));
            suffix[k] = s.value();
        }
    }
    double cum_log = -kInf;
    for (std::size_t k = 0; k < k_total; ++k) {
        const auto& c = classes[k];
        if (suffix[k + 1] > epsilon) {
            cum_log = log_add(cum_log, c.log_count);
            continue;
        }
        // Need m sequences from this class with suffix[k+1] + (count - m) p_seq <= epsilon.
        const double spare_log = std::log(epsilon - suffix[k + 1]) - c.log_pseq;
        double m_log;
        if (spare_log >= c.log_count) {
            m_log = -kInf;
        } else {
            m_log = c.log_count + std::log1p(-std::exp(spare_log - c.log_count));
            if (m_log < kExactLog) {
                const double m = std::ceil(snap(std::exp(m_log)));
                m_log = m >= 1.0 ? std::log(m) : -kInf;
            }
        }
        const double total = log_add(cum_log, m_log);
        return std::max(0.0, total) / static_cast<double>(n);
    }
    return std::max(0.0, cum_log) / static_cast<double>(n);
}

} // namespace nep
