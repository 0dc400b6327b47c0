#pragma once

#include <cstdint>

#include "nep/spectrum.hpp"

namespace nep {

/// Berry-Esseen constant. Any valid universal constant keeps every bound true; 0.56 is the default.
struct BoundOptions {
    double berry_constant = 0.56;
};

struct Prefactors {
    double xi_upper = 0.0;
    double xi_lower = 0.0;
    double rho_star = 0.0; ///< Q(rho_star) = beta; 0 when clamped
    double rho_sub = 0.0;  ///< Q(rho_sub) = 1/2 - 2 beta; +inf when vacuous
    double c_berry = 0.56;
    double beta = 0.0;     ///< C M / (sqrt(n) sigma^3) at the tilt
    double a = 0.0;        ///< sqrt(n) lambda sigma
    bool vacuous_lower = false;
    bool clamped_rho_star = false;
    RatePoint point;
};

enum class BoundMethod { weak, strong, clt_window, tightened };

struct TailBoundResult {
    double lower = 0.0;
    double upper = 1.0;
    double log_lower = 0.0; ///< ln lower (-inf when lower is 0)
    double log_upper = 0.0;
    double rate = 0.0;
    BoundMethod method = BoundMethod::weak;
    std::int64_t n = 1;
    Side side = Side::right;
    bool in_stated_range = true; ///< clt_window only: delta <= sigma sqrt(ln n / n)
    bool point_mass = false;     ///< weak only: delta sits on the extreme gap
};

const char* to_string(BoundMethod m) noexcept;

TailBoundResult weak_tail_bound(const CompositeSpectrum& spec, Side side, double delta, std::int64_t n);

Prefactors prefactors(const CompositeSpectrum& spec, Side side, double delta, std::int64_t n,
                      const BoundOptions& opts = {});

TailBoundResult strong_tail_bounds(const CompositeSpectrum& spec, Side side, double delta,
                                   std::int64_t n, const BoundOptions& opts = {});

TailBoundResult clt_window_bounds(const CompositeSpectrum& spec, Side side, double delta,
                                  std::int64_t n, const BoundOptions& opts = {});

/// Re-bounds the tilted tail inside the prefactor integral with strong bounds on the tilted
/// spectrum, `depth` levels deep. Never looser than strong_tail_bounds.
TailBoundResult recursive_tighten(const CompositeSpectrum& spec, Side side, double delta,
                                  std::int64_t n, int depth, const BoundOptions& opts = {});

} // namespace nep
