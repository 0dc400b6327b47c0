#include "doctest.h"

#include <cmath>
#include <vector>

#include "nep/errors.hpp"
#include "nep/numeric.hpp"

using namespace nep;

TEST_CASE("q_function anchors") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-14));
    CHECK(q_function(-1.0) == doctest::Approx(1.0 - q_function(1.0)).epsilon(1e-15));
}

TEST_CASE("log_q is accurate deep in the tail") {
    // mpmath, 40 digits
    CHECK(log_q(10.0) == doctest::Approx(-53.231285150512470578).epsilon(1e-14));
    CHECK(log_q(40.0) == doctest::Approx(-804.60844201375378817).epsilon(1e-14));
    // continuity across the switch to the continued fraction
    CHECK(log_q(8.0 - 1e-12) == doctest::Approx(log_q(8.0 + 1e-12)).epsilon(1e-11));
    CHECK(std::isfinite(log_q(1e3)));
}

TEST_CASE("scaled_q avoids overflow") {
    CHECK(scaled_q(30.0, 2.0) == doctest::Approx(1.4759754173120506e-29).epsilon(1e-12));
    CHECK(scaled_q(3.0, 0.5) == doctest::Approx(0.020940602351860324).epsilon(1e-13));
    CHECK(scaled_q(1.0, INFINITY) == 0.0);
    // e^{a^2/2} Q(a) ~ 1/(a sqrt(2 pi)) for large a
    const double a = 1e4;
    CHECK(scaled_q(a, 0.0) * a * std::sqrt(2 * M_PI) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("q_inverse round trip") {
    CHECK(q_inverse(0.5) == 0.0);
    CHECK(q_inverse(1e-10) == doctest::Approx(6.3613409024040562).epsilon(1e-13));
    for (double p : {1e-300, 1e-50, 1e-8, 0.001, 0.1, 0.3, 0.49999, 0.7, 0.95, 1 - 1e-9}) {
        CAPTURE(p);
        const double err = std::fabs(q_function(q_inverse(p)) - p);
        CHECK(err <= 1e-10 * std::min(p, 1.0 - p) + 1e-16);
    }
    CHECK_THROWS_AS(q_inverse(0.0), DomainError);
    CHECK_THROWS_AS(q_inverse(1.0), DomainError);
    CHECK_THROWS_AS(q_inverse(NAN), DomainError);
}

TEST_CASE("log_sum_exp and compensated sums") {
    std::vector<double> xs{1000.0, 1000.0};
    CHECK(log_sum_exp(xs) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_sum_exp(std::vector<double>{}) == -INFINITY);
    CHECK(log_add(-INFINITY, 3.0) == 3.0);

    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    CHECK(s.value() == doctest::Approx(1.0 + 1e-13).epsilon(1e-15));
}
