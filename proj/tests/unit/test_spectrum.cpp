#include "doctest.h"

#include <cmath>
#include <vector>

#include "nep/errors.hpp"
#include "nep/sources.hpp"
#include "nep/spectrum.hpp"

using namespace nep;

namespace {

ValueSpectrum bern012() { return entropy_spectrum(DiscreteDistribution({0.12, 0.88})); }
ValueSpectrum three_symbol() { return entropy_spectrum(DiscreteDistribution({0.6, 0.3, 0.1})); }

// Independent Legendre evaluation: dense grid then golden section on lambda.
double legendre(const CompositeSpectrum& s, Side side, double delta, double lam_hi) {
    const double sgn = side == Side::right ? 1.0 : -1.0;
    auto obj = [&](double l) { return l * (sgn * s.mean() + delta) - cgf(s, sgn * l); };
    double best = 0.0, arg = 0.0;
    const int grid = 4000;
    for (int i = 0; i <= grid; ++i) {
        const double l = lam_hi * i / grid;
        if (obj(l) > best) { best = obj(l); arg = l; }
    }
    double a = std::max(0.0, arg - lam_hi / grid), b = arg + lam_hi / grid;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (obj(c) > obj(d)) b = d; else a = c;
    }
    return obj(0.5 * (a + b));
}

} // namespace

TEST_CASE("construction merges and validates") {
    ValueSpectrum s({{1.0, 0.25}, {1.0 + 1e-15, 0.25}, {2.0, 0.5}});
    CHECK(s.size() == 2);
    CHECK(s.entries()[0].weight == doctest::Approx(0.5));
    CHECK_THROWS_AS(ValueSpectrum({{1.0, 0.5}}), InvalidDistribution);
    CHECK_THROWS_AS(ValueSpectrum({{1.0, 1.0}, {2.0, 0.0}}), InvalidDistribution);
    CHECK_THROWS_AS(ValueSpectrum({{NAN, 1.0}}), InvalidDistribution);
    CHECK_THROWS_AS(ValueSpectrum(std::vector<SpectrumEntry>{}), InvalidDistribution);

    const auto u = entropy_spectrum(DiscreteDistribution({0.25, 0.25, 0.25, 0.25}));
    CHECK(u.size() == 1);
    CHECK(u.degenerate());
}

TEST_CASE("cgf values") {
    ValueSpectrum single({{std::log(2.0), 1.0}});
    CHECK(cgf(single, 3.0) == doctest::Approx(3 * std::log(2.0)));
    CHECK(cgf(bern012(), 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const auto half = entropy_spectrum(DiscreteDistribution({0.5, 0.5}));
    CHECK(cgf(half, -2.5) == doctest::Approx(-2.5 * std::log(2.0)));
    // no overflow for |theta v| near 700
    CHECK(std::isfinite(cgf(bern012(), 330.0)));
    CHECK(std::isfinite(cgf(bern012(), -5000.0)));
}

TEST_CASE("tilted_stats at zero gives untilted moments") {
    const auto st = tilted_stats(bern012(), 0.0);
    CHECK(std::fabs(st.shift) < 1e-15);
    CHECK(st.sigma2 == doctest::Approx(0.41920855269928188).epsilon(1e-13));
    CHECK(st.m3 == doctest::Approx(0.65884028237956379).epsilon(1e-13));
    CHECK_THROWS_AS(tilted_stats(ValueSpectrum({{1.0, 1.0}}), 0.0), DegenerateSpectrum);
}

TEST_CASE("domain limits") {
    const auto r = domain_limits(bern012(), Side::right);
    CHECK(r.lambda_star == INFINITY);
    CHECK(r.delta_star == doctest::Approx(1.7533385449273814).epsilon(1e-14));
    CHECK(domain_limits(bern012(), Side::left).delta_star == doctest::Approx(0.23909161976282474).epsilon(1e-13));
    CHECK(domain_limits(ValueSpectrum({{0.7, 1.0}}), Side::right).delta_star == 0.0);
    CHECK_FALSE(r.truncated);
}

TEST_CASE("rate_at frozen values") {
    const CompositeSpectrum s = bern012();
    const auto p = rate_at(s, Side::right, 0.2);
    CHECK(p.lambda == doctest::Approx(0.36587303104223972).epsilon(1e-10));
    CHECK(p.rate == doctest::Approx(0.039536585926018311).epsilon(1e-12));
    CHECK(p.sigma2 == doctest::Approx(0.68205793773219322).epsilon(1e-10));
    CHECK(p.m3 == doctest::Approx(0.89198233398454999).epsilon(1e-10));

    const auto l = rate_at(s, Side::left, 0.1);
    CHECK(l.side == Side::left);
    CHECK(l.lambda == doctest::Approx(0.29972488145169260).epsilon(1e-10));
    CHECK(l.rate == doctest::Approx(0.013777701888134209).epsilon(1e-12));

    const auto z = rate_at(s, Side::right, 0.0);
    CHECK(z.lambda == 0.0);
    CHECK(z.rate == 0.0);

    CHECK_THROWS_AS(rate_at(s, Side::right, 1.7533385449273814), DeltaOutOfRange);
    CHECK_THROWS_AS(rate_at(s, Side::left, 0.3), DeltaOutOfRange);
    CHECK_THROWS_AS(rate_at(s, Side::right, -0.1), DeltaOutOfRange);
    CHECK_THROWS_AS(rate_at(ValueSpectrum({{1.0, 1.0}}), Side::right, 0.0), DegenerateSpectrum);
}

TEST_CASE("Legendre duality against brute-force maximization") {
    for (const CompositeSpectrum s : {CompositeSpectrum(bern012()), CompositeSpectrum(three_symbol())}) {
        for (Side side : {Side::right, Side::left}) {
            const double ds = domain_limits(s, side).delta_star;
            for (double f : {0.05, 0.3, 0.7, 0.95}) {
                const double d = f * ds;
                const auto p = rate_at(s, side, d);
                CAPTURE(d);
                CHECK(p.rate == doctest::Approx(legendre(s, side, d, 4.0 * p.lambda + 1.0)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("derivative identities") {
    const CompositeSpectrum s = three_symbol();
    for (Side side : {Side::right, Side::left}) {
        const double d = 0.4 * domain_limits(s, side).delta_star;
        const double h = 1e-5;
        const auto p = rate_at(s, side, d);
        const double r_plus = rate_at(s, side, d + h).rate;
        const double r_minus = rate_at(s, side, d - h).rate;
        CHECK((r_plus - r_minus) / (2 * h) == doctest::Approx(p.lambda).epsilon(1e-6));
        const double h2 = 1e-3;
        const double second = (rate_at(s, side, d + h2).rate - 2 * p.rate + rate_at(s, side, d - h2).rate) / (h2 * h2);
        CHECK(second == doctest::Approx(1.0 / p.sigma2).epsilon(1e-4));
    }
}

TEST_CASE("quadratic regime near zero") {
    for (const CompositeSpectrum s : {CompositeSpectrum(bern012()), CompositeSpectrum(three_symbol())}) {
        const double s2 = tilted_stats(s, 0.0).sigma2;
        const double d = 1e-3;
        CHECK(rate_at(s, Side::right, d).rate * 2 * s2 / (d * d) == doctest::Approx(1.0).epsilon(0.01));
        CHECK(rate_at(s, Side::left, d).rate * 2 * s2 / (d * d) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("shift and rate are monotone along a lambda grid") {
    const CompositeSpectrum s = three_symbol();
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(0.1 * i);
    for (Side side : {Side::right, Side::left}) {
        const auto pts = rate_curve(s, side, grid);
        CHECK(pts.front().delta == 0.0);
        CHECK(pts.front().rate == 0.0);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].delta > pts[i - 1].delta);
            CHECK(pts[i].rate > pts[i - 1].rate);
            CHECK(pts[i].sigma2 > 0.0);
        }
    }
    std::vector<double> bad{-1.0};
    CHECK_THROWS_AS(rate_curve(s, Side::right, bad), DomainError);
}

TEST_CASE("composite reduction is bitwise") {
    const auto v = three_symbol();
    const CompositeSpectrum single(v);
    const CompositeSpectrum repeated(std::vector<Component>{{0.25, v}, {0.5, v}, {0.25, v}});
    CHECK(repeated.components().size() == 1);
    CHECK(repeated.mean() == single.mean());
    for (double d : {0.01, 0.3, 0.8}) {
        const auto a = rate_at(single, Side::right, d);
        const auto b = rate_at(repeated, Side::right, d);
        CHECK(a.rate == b.rate);
        CHECK(a.lambda == b.lambda);
        CHECK(a.sigma2 == b.sigma2);
        CHECK(a.m3 == b.m3);
    }
    CHECK(cgf(single, 0.7) == cgf(repeated, 0.7));
}

TEST_CASE("composite moments add with type weights") {
    const auto a = bern012();
    const auto b = three_symbol();
    const CompositeSpectrum c(std::vector<Component>{{0.25, a}, {0.75, b}});
    CHECK(c.mean() == doctest::Approx(0.25 * a.mean() + 0.75 * b.mean()).epsilon(1e-15));
    const auto st = tilted_stats(c, 0.4);
    const auto sa = tilted_stats(a, 0.4);
    const auto sb = tilted_stats(b, 0.4);
    CHECK(st.sigma2 == doctest::Approx(0.25 * sa.sigma2 + 0.75 * sb.sigma2).epsilon(1e-14));
    CHECK(st.m3 == doctest::Approx(0.25 * sa.m3 + 0.75 * sb.m3).epsilon(1e-14));
    CHECK(cgf(c, 0.4) == doctest::Approx(0.25 * cgf(a, 0.4) + 0.75 * cgf(b, 0.4)).epsilon(1e-15));
    CHECK(domain_limits(c, Side::right).delta_star ==
          doctest::Approx(0.25 * domain_limits(a, Side::right).delta_star + 0.75 * domain_limits(b, Side::right).delta_star));
}

TEST_CASE("left side equals right side of the negated spectrum") {
    const CompositeSpectrum s = three_symbol();
    const auto neg = s.negated();
    for (double d : {0.05, 0.2, 0.35}) {
        const auto l = rate_at(s, Side::left, d);
        const auto r = rate_at(neg, Side::right, d);
        CHECK(l.rate == doctest::Approx(r.rate).epsilon(1e-13));
        CHECK(l.lambda == doctest::Approx(r.lambda).epsilon(1e-10));
    }
}

TEST_CASE("tilted spectrum has shifted mean") {
    const auto s = three_symbol();
    const double theta = 0.8;
    const auto t = s.tilted(theta);
    CHECK(t.mean() == doctest::Approx(s.mean() + tilted_stats(s, theta).shift).epsilon(1e-14));
    CHECK(tilted_stats(t, 0.0).sigma2 == doctest::Approx(tilted_stats(s, theta).sigma2).epsilon(1e-13));
}
