#include "nep/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nep/errors.hpp"
#include "nep/numeric.hpp"

namespace nep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Upper end of the rho range in the tightening integral; truncation only drops (non-negative) gains.
constexpr double kRhoMax = 12.0;

void check_n(std::int64_t n) {
    if (n < 1) throw DomainError("block length n must be >= 1");
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

// Prefactors from the tilt parameter a = sqrt(n) lambda sigma and beta = C M / (sqrt(n) sigma^3).
void fill_xi(Prefactors& pf) {
    const double a = pf.a;
    const double beta = pf.beta;
    if (beta >= 0.5) {
        pf.clamped_rho_star = true;
        pf.rho_star = 0.0;
        pf.xi_upper = 0.5 + beta;
    } else {
        pf.rho_star = q_inverse(beta);
        pf.xi_upper = 2.0 * beta + scaled_q(a, 0.0) - scaled_q(a, pf.rho_star);
    }
    const double gamma = 0.5 - 2.0 * beta;
    if (gamma <= 0.0) {
        pf.vacuous_lower = true;
        pf.rho_sub = kInf;
        pf.xi_lower = 0.0;
    } else {
        pf.rho_sub = q_inverse(gamma);
        pf.xi_lower = scaled_q(a, pf.rho_sub);
    }
}

void require_interior(const CompositeSpectrum& spec, Side side, double delta) {
    if (spec.degenerate()) throw DegenerateSpectrum("spectrum has zero variance");
    const double dstar = domain_limits(spec, side).delta_star;
    if (!(delta > 0.0 && delta < dstar)) {
        throw DeltaOutOfRange("strong bounds need 0 < delta < delta_star");
    }
}

TailBoundResult from_logs(double log_lower, double log_upper, double rate, BoundMethod m,
                          std::int64_t n, Side side) {
    TailBoundResult r;
    r.log_upper = std::min(0.0, log_upper);
    r.log_lower = std::min(log_lower, r.log_upper);
    r.upper = std::exp(r.log_upper);
    r.lower = std::exp(r.log_lower);
    r.rate = rate;
    r.method = m;
    r.n = n;
    r.side = side;
    return r;
}

TailBoundResult strong_from(const Prefactors& pf, std::int64_t n, Side side) {
    const double nr = static_cast<double>(n) * pf.point.rate;
    const double log_up = std::min(safe_log(pf.xi_upper), 0.0) - nr;
    const double log_lo = safe_log(pf.xi_lower) - nr;
    return from_logs(log_lo, log_up, pf.point.rate, BoundMethod::strong, n, side);
}

// Closed form of int_{r0}^inf a e^{-a rho} [gamma - Q(rho)]^+ d rho.
double positive_part_tail(double a, double gamma, double rho_sub, double r0) {
    if (gamma <= 0.0) return 0.0;
    const double rm = std::max(r0, rho_sub);
    if (rm == kInf) return 0.0;
    return std::exp(-a * rm) * (gamma - q_function(rm)) + scaled_q(a, rm);
}

} // namespace

const char* to_string(BoundMethod m) noexcept {
    switch (m) {
    case BoundMethod::weak: return "weak";
    case BoundMethod::strong: return "strong";
    case BoundMethod::clt_window: return "clt_window";
    case BoundMethod::tightened: return "tightened";
    }
    return "?";
}

TailBoundResult weak_tail_bound(const CompositeSpectrum& spec, Side side, double delta, std::int64_t n) {
    check_n(n);
    if (spec.degenerate()) throw DegenerateSpectrum("spectrum has zero variance");
    if (!(delta >= 0.0)) throw DeltaOutOfRange("delta must be non-negative");
    const double dstar = domain_limits(spec, side).delta_star;
    const double nd = static_cast<double>(n);
    if (delta >= dstar || std::fabs(delta - dstar) <= 1e-12 * std::max(1.0, dstar)) {
        TailBoundResult r;
        if (std::fabs(delta - dstar) <= 1e-12 * std::max(1.0, dstar)) {
            // Only the all-extreme block reaches the boundary.
            r = from_logs(-kInf, nd * log_extreme_weight(spec, side), kInf, BoundMethod::weak, n, side);
            r.point_mass = true;
        } else {
            r = from_logs(-kInf, -kInf, kInf, BoundMethod::weak, n, side);
        }
        return r;
    }
    const auto pt = rate_at(spec, side, delta);
    return from_logs(-kInf, -nd * pt.rate, pt.rate, BoundMethod::weak, n, side);
}

Prefactors prefactors(const CompositeSpectrum& spec, Side side, double delta, std::int64_t n,
                      const BoundOptions& opts) {
    check_n(n);
    require_interior(spec, side, delta);
    Prefactors pf;
    pf.c_berry = opts.berry_constant;
    pf.point = rate_at(spec, side, delta);
    const double sigma = std::sqrt(pf.point.sigma2);
    const double rn = std::sqrt(static_cast<double>(n));
    pf.beta = opts.berry_constant * pf.point.m3 / (rn * sigma * sigma * sigma);
    pf.a = rn * pf.point.lambda * sigma;
    fill_xi(pf);
    return pf;
}

TailBoundResult strong_tail_bounds(const CompositeSpectrum& spec, Side side, double delta,
                                   std::int64_t n, const BoundOptions& opts) {
    return strong_from(prefactors(spec, side, delta, n, opts), n, side);
}

TailBoundResult clt_window_bounds(const CompositeSpectrum& spec, Side side, double delta,
                                  std::int64_t n, const BoundOptions& opts) {
    check_n(n);
    if (!(delta >= 0.0)) throw DeltaOutOfRange("delta must be non-negative");
    const auto st = tilted_stats(spec, 0.0);
    const double sigma = std::sqrt(st.sigma2);
    const double nd = static_cast<double>(n);
    const double rn = std::sqrt(nd);
    const double beta = opts.berry_constant * st.m3 / (rn * sigma * sigma * sigma);
    const double q = q_function(delta * rn / sigma);
    TailBoundResult r;
    r.lower = std::clamp(q - beta, 0.0, 1.0);
    r.upper = std::clamp(q + beta, 0.0, 1.0);
    r.log_lower = safe_log(r.lower);
    r.log_upper = safe_log(r.upper);
    r.rate = 0.0; // no exponential factor in this bound
    r.method = BoundMethod::clt_window;
    r.n = n;
    r.side = side;
    r.in_stated_range = delta <= sigma * std::sqrt(std::log(nd) / nd);
    return r;
}

TailBoundResult recursive_tighten(const CompositeSpectrum& spec, Side side, double delta,
                                  std::int64_t n, int depth, const BoundOptions& opts) {
    const Prefactors pf = prefactors(spec, side, delta, n, opts);
    const TailBoundResult base = strong_from(pf, n, side);
    if (depth <= 0) return base;

    // Tilted law Z of the oriented variable; its right tail is the F-bar of the prefactor integral.
    const CompositeSpectrum oriented = side == Side::right ? spec : spec.negated();
    const CompositeSpectrum z = oriented.tilted(pf.point.lambda);
    const double dstar_z = domain_limits(z, Side::right).delta_star;
    const double step = std::sqrt(pf.point.sigma2 / static_cast<double>(n));
    const double a = pf.a;
    const double beta = pf.beta;
    const double l_zero = 0.5 - beta;
    const double rho_c = dstar_z / step;

    // Gains over the depth-0 integrands at a single rho.
    auto gains = [&](double rho, double& g_up, double& g_lo) {
        g_up = 0.0;
        g_lo = 0.0;
        if (!(rho > 0.0) || rho >= rho_c) return;
        const double q = q_function(rho);
        const double l0 = std::max(0.0, q - beta);
        const double u0 = std::min(1.0, q + beta);
        TailBoundResult inner;
        try {
            inner = recursive_tighten(z, Side::right, rho * step, n, depth - 1, opts);
        } catch (const DeltaOutOfRange&) {
            return; // too close to the edge to resolve; keep the depth-0 integrand
        }
        const double l1 = std::max(l0, inner.lower);
        const double u1 = std::min(u0, inner.upper);
        g_up = l1 - l0;
        g_lo = std::max(0.0, l_zero - u1) - std::max(0.0, l_zero - u0);
    };

    // Integrand values on a uniform rho grid over [0, R]; the weight a e^{-a rho} is integrated
    // exactly against the piecewise-linear interpolant of the gains, so panel size does not
    // have to resolve the exponential decay.
    const double r_end = std::min(rho_c, kRhoMax);
    const bool ends_at_edge = rho_c <= kRhoMax;
    auto sample = [&](double rho, bool last, double& g_up, double& g_lo) {
        if (last && ends_at_edge) {
            // Left limit at rho_c: the tilted tail tends to the all-extreme point mass.
            const double u0 = std::min(1.0, q_function(rho_c) + beta);
            const double u1 = std::min(u0, std::exp(static_cast<double>(n) * log_extreme_weight(z, Side::right)));
            g_up = 0.0;
            g_lo = std::max(0.0, l_zero - u1) - std::max(0.0, l_zero - u0);
            return;
        }
        gains(rho, g_up, g_lo);
    };
    auto integrate = [&](const std::vector<double>& g, int panels) {
        const double h = r_end / panels;
        const double e = -std::expm1(-a * h);                 // int_0^h a e^{-at} dt
        const double slope = e / (a * h) - (1.0 - e);         // int_0^h a e^{-at} t/h dt
        CompensatedSum s;
        for (int i = 0; i < panels; ++i) {
            const double w = std::exp(-a * h * i);
            s.add(w * (g[i] * e + (g[i + 1] - g[i]) * slope));
        }
        return s.value();
    };

    int panels = 512;
    std::vector<double> up_vals(panels + 1), lo_vals(panels + 1);
    for (int i = 0; i <= panels; ++i) sample(r_end * i / panels, i == panels, up_vals[i], lo_vals[i]);
    double gain_up = integrate(up_vals, panels);
    double gain_lo = integrate(lo_vals, panels);

    for (int round = 0; round < 6; ++round) {
        const int finer = 2 * panels;
        std::vector<double> nu(finer + 1), nl(finer + 1);
        for (int i = 0; i <= finer; ++i) {
            if (i % 2 == 0) {
                nu[i] = up_vals[i / 2];
                nl[i] = lo_vals[i / 2];
            } else {
                sample(r_end * i / finer, false, nu[i], nl[i]);
            }
        }
        const double next_up = integrate(nu, finer);
        const double next_lo = integrate(nl, finer);
        const bool done = std::fabs(next_up - gain_up) <= 1e-6 * pf.xi_upper &&
                          std::fabs(next_lo - gain_lo) <= 1e-6 * (pf.xi_lower + next_lo) + 1e-300;
        up_vals.swap(nu);
        lo_vals.swap(nl);
        gain_up = next_up;
        gain_lo = next_lo;
        panels = finer;
        if (done) break;
    }

    // Beyond rho_c the tilted tail is exactly zero, so the lower integrand is known in closed form.
    if (ends_at_edge) {
        const double gamma = 0.5 - 2.0 * beta;
        gain_lo += std::max(0.0, l_zero) * std::exp(-a * rho_c) -
                   positive_part_tail(a, gamma, pf.rho_sub, rho_c);
    }

    const double xi_up = std::max(0.0, pf.xi_upper - std::max(0.0, gain_up));
    const double xi_lo = pf.xi_lower + std::max(0.0, gain_lo);
    const double nr = static_cast<double>(n) * pf.point.rate;
    auto out = from_logs(std::max(base.log_lower, safe_log(xi_lo) - nr),
                         std::min(base.log_upper, safe_log(xi_up) - nr), pf.point.rate,
                         BoundMethod::tightened, n, side);
    return out;
}

} // namespace nep
