#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "nep/errors.hpp"
#include "nep/oracle.hpp"
#include "nep/sources.hpp"

using namespace nep;

namespace {

ValueSpectrum bern012() { return entropy_spectrum(DiscreteDistribution({0.12, 0.88})); }

} // namespace

TEST_CASE("binomial tail") {
    // K ~ Bin(10, 0.12): the average exceeds mean + 0.2 exactly when K >= 3
    CHECK(exact_tail(bern012(), Side::right, 0.2, 10) == doctest::Approx(0.10868179372197544).epsilon(1e-13));
    CHECK(exact_tail(bern012(), Side::right, 0.1, 1000) ==
          doctest::Approx(1.4856628606179224e-06).epsilon(1e-10));
    CHECK(composition_count(10, 2) == 11.0);
    CHECK(composition_count(5, 3) == 21.0);
}

TEST_CASE("distribution has unit mass and the right mean") {
    const auto v = entropy_spectrum(DiscreteDistribution({0.5, 0.3, 0.2}));
    const auto d = exact_distribution(v, 7);
    double mass = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < d.atoms.size(); ++i) {
        mass += d.atoms[i].prob;
        mean += d.atoms[i].prob * d.atoms[i].value;
        if (i > 0) CHECK(d.atoms[i - 1].value < d.atoms[i].value);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean == doctest::Approx(v.mean()).epsilon(1e-13));
}

TEST_CASE("enumeration agrees with brute force over all sequences") {
    const auto v = entropy_spectrum(DiscreteDistribution({0.5, 0.3, 0.2}));
    const int n = 6;
    const auto e = v.entries();
    const double thr = v.mean() + 0.15;
    double brute = 0.0;
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
        int c = code;
        double s = 0.0, p = 1.0;
        for (int i = 0; i < n; ++i) {
            s += e[c % 3].value;
            p *= e[c % 3].weight;
            c /= 3;
        }
        if (s / n > thr + 1e-12 * std::max(1.0, thr)) brute += p;
    }
    CHECK(exact_tail(v, Side::right, 0.15, n) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("tails are monotone and the log tail matches") {
    const auto v = bern012();
    double prev = 1.0;
    for (int i = 0; i < 30; ++i) {
        const double t = exact_tail(v, Side::right, 0.05 * i, 200);
        CHECK(t <= prev);
        prev = t;
    }
    const auto d = exact_distribution(v, 2000);
    const double thr = v.mean() + 0.5;
    CHECK(d.tail(Side::right, thr) > 0.0);
    CHECK(std::log(d.tail(Side::right, thr)) == doctest::Approx(d.log_tail(Side::right, thr)).epsilon(1e-12));
    // far beyond what a double can hold
    CHECK(d.log_tail(Side::right, v.mean() + 1.7) < -700.0);
    CHECK(std::isfinite(d.log_tail(Side::right, v.mean() + 1.7)));
}

TEST_CASE("enumeration limit") {
    const auto v = entropy_spectrum(DiscreteDistribution({0.02, 0.04, 0.06, 0.08, 0.1, 0.11, 0.12, 0.13, 0.16, 0.18}));
    CHECK_THROWS_AS(exact_distribution(v, 1000), TooLarge);
}

TEST_CASE("composite oracle reduces to the single-spectrum oracle") {
    const auto v = bern012();
    const CompositeSpectrum c = v;
    const std::vector<std::int64_t> counts{50};
    const double thr = v.mean() + 0.1;
    CHECK(exact_tail_composite(c, counts, Side::right, thr) == exact_tail(v, Side::right, 0.1, 50));

    const auto a = entropy_spectrum(DiscreteDistribution({0.3, 0.7}));
    const auto b = entropy_spectrum(DiscreteDistribution({0.1, 0.5, 0.4}));
    const CompositeSpectrum two({{0.5, a}, {0.5, b}});
    const auto counts2 = type_counts(two, 8);
    CHECK(counts2 == std::vector<std::int64_t>{4, 4});
    const auto d = exact_distribution_composite(two, counts2);
    double mass = 0.0, mean = 0.0;
    for (const auto& at : d.atoms) {
        mass += at.prob;
        mean += at.prob * at.value;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean == doctest::Approx(two.mean()).epsilon(1e-13));
    CHECK_THROWS_AS(type_counts(two, 7), DomainError);
}

TEST_CASE("SplitMix64 reference vectors") {
    const CounterRng r0(0);
    CHECK(r0.at(0) == 0xe220a8397b1dcdafULL);
    CHECK(r0.at(1) == 0x6e789e6aa1b965f4ULL);
    CHECK(r0.at(2) == 0x06c45d188009454fULL);
    CHECK(CounterRng(12345).at(0) == 0x22118258a9d111a0ULL);
    const double u = r0.uniform_at(0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == static_cast<double>(0xe220a8397b1dcdafULL >> 11) * 0x1.0p-53);
}

TEST_CASE("Monte Carlo interval contains the exact tail") {
    const auto v = bern012();
    const double ex = exact_tail(v, Side::right, 0.2, 10);
    const auto mc = mc_tail(v, Side::right, 0.2, 10, 200000, 42);
    CHECK(mc.samples == 200000);
    CHECK(mc.ci_low <= ex);
    CHECK(ex <= mc.ci_high);
    CHECK(mc.estimate == doctest::Approx(static_cast<double>(mc.hits) / mc.samples));
}

TEST_CASE("Monte Carlo is deterministic across thread counts") {
    const auto v = entropy_spectrum(DiscreteDistribution({0.6, 0.3, 0.1}));
    ::setenv("NEP_THREADS", "1", 1);
    const auto a = mc_tail(v, Side::left, 0.1, 20, 30000, 9);
    ::setenv("NEP_THREADS", "5", 1);
    const auto b = mc_tail(v, Side::left, 0.1, 20, 30000, 9);
    ::unsetenv("NEP_THREADS");
    CHECK(a.hits == b.hits);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
}

TEST_CASE("Monte Carlo coverage") {
    const auto v = bern012();
    const double ex = exact_tail(v, Side::right, 0.1, 30);
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto mc = mc_tail(v, Side::right, 0.1, 30, 4000, seed);
        if (mc.ci_low <= ex && ex <= mc.ci_high) ++covered;
    }
    CHECK(covered >= 90);
}
