#include <doctest.h>

#include <cmath>

#include "fracstep/fractional_weights.hpp"
#include "fracstep/special_functions.hpp"
#include "support/test_oracles.hpp"

using fracstep::grunwald_coeffs;
using fracstep::l21_ab;
using fracstep::l21_c;
using fracstep::wsgd_weights;

TEST_CASE("grunwald recurrence start values") {
    CHECK(grunwald_coeffs(0.7, 1)[1] == doctest::Approx(-0.7).epsilon(1e-15));
    CHECK(grunwald_coeffs(1.8, 2)[2] == doctest::Approx(0.72).epsilon(1e-15));
}

TEST_CASE("grunwald coefficients match the signed binomial product formula") {
    for (const double order : {0.3, 0.6, 1.2, 1.8}) {
        const auto g = grunwald_coeffs(order, 40);
        for (std::size_t k = 0; k <= 40; ++k)
            CHECK(g[k] == doctest::Approx(oracle::signed_binomial(order, k)).epsilon(1e-12));
    }
}

TEST_CASE("grunwald partial sums for order in (0,1) decay to zero from above") {
    const auto g = grunwald_coeffs(0.6, 50);
    double partial = 0.0;
    double prev = 2.0;
    for (std::size_t k = 0; k <= 50; ++k) {
        partial += g[k];
        CHECK(partial > 0.0);
        if (k >= 1) CHECK(partial < prev);
        prev = partial;
    }
}

TEST_CASE("wsgd closed-form leading weights") {
    const auto w06 = wsgd_weights(0.6, 4);
    CHECK(w06.omega[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(w06.omega[1] == doctest::Approx(0.52).epsilon(1e-15));
    const auto w18 = wsgd_weights(1.8, 4);
    CHECK(w18.omega[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(w18.omega[1] == doctest::Approx(-1.52).epsilon(1e-15));
    const auto w20 = wsgd_weights(2.0, 4);
    CHECK(w20.omega[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("wsgd weights match the product-formula reference") {
    for (const double order : {0.5, 0.99, 1.5, 1.99}) {
        const auto w = wsgd_weights(order, 64);
        const auto ref = oracle::wsgd_omega_reference(order, 64);
        for (std::size_t k = 0; k <= 64; ++k)
            CHECK(w.omega[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    }
}

TEST_CASE("wsgd sign pattern for orders in (0,1)") {
    for (const double order : {0.1, 0.5, 0.6, 0.8, 0.99}) {
        const auto w = wsgd_weights(order, 4096);
        CHECK(w.omega[0] > 0.0);
        CHECK(w.omega[1] > 0.0);
        CHECK(w.omega[2] < 0.0);
        CHECK(w.omega[0] + w.omega[2] < 0.0);
        CHECK(w.omega[1] == doctest::Approx((2.0 - order - order * order) / 2.0).epsilon(1e-14));
        CHECK(w.omega[2] ==
              doctest::Approx(order * (order * order + order - 4.0) / 4.0).epsilon(1e-13));
        for (std::size_t k = 3; k <= 4096; ++k) {
            CHECK(w.omega[k] < 0.0);
            CHECK(w.omega[k] > w.omega[k - 1]);
        }
        double partial = 0.0;
        for (std::size_t k = 0; k <= 4096; ++k) {
            partial += w.omega[k];
            if (k >= 1) CHECK(partial > 0.0);
        }
    }
}

TEST_CASE("wsgd sign pattern for orders in (1,2)") {
    for (const double order : {1.1, 1.5, 1.8, 1.9, 1.99}) {
        const auto w = wsgd_weights(order, 4096);
        CHECK(w.omega[0] > 0.0);
        CHECK(w.omega[0] <= 1.0);
        CHECK(w.omega[1] < 0.0);
        CHECK(w.omega[0] + w.omega[2] > 0.0);
        CHECK(w.omega[0] >= w.omega[3]);
        for (std::size_t k = 4; k <= 4096; ++k) {
            CHECK(w.omega[k] >= 0.0);
            CHECK(w.omega[k] <= w.omega[k - 1]);
        }
        double partial = 0.0;
        for (std::size_t k = 0; k <= 4096; ++k) {
            partial += w.omega[k];
            if (k >= 2) CHECK(partial < 0.0);
        }
    }
}

TEST_CASE("wsgd partial sums shrink in magnitude as the index grows") {
    for (const double order : {0.5, 1.8}) {
        const auto w = wsgd_weights(order, 512);
        double partial = w.omega[0] + w.omega[1] + w.omega[2] + w.omega[3];
        double prev_mag = std::abs(partial);
        for (std::size_t k = 4; k <= 512; ++k) {
            partial += w.omega[k];
            CHECK(std::abs(partial) < prev_mag);
            prev_mag = std::abs(partial);
        }
    }
}

TEST_CASE("temporal table leading entry and the theta = 1 collapse") {
    const auto t05 = l21_ab(0.5, 8);
    CHECK(t05.sigma == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(t05.a[0] == doctest::Approx(0.8660254037844386).epsilon(1e-15));

    const auto t1 = l21_ab(1.0, 8);
    CHECK(t1.a[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t l = 1; l < 8; ++l) {
        CHECK(t1.a[l] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(t1.b[l] == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("temporal b entry against extended-precision evaluation") {
    const auto t = l21_ab(0.5, 4);
    const long double s = 0.75L;
    const long double b1 = (std::pow(1.0L + s, 1.5L) - std::pow(s, 1.5L)) / 1.5L -
                           0.5L * (std::pow(1.0L + s, 0.5L) + std::pow(s, 0.5L));
    CHECK(t.b[1] == doctest::Approx(static_cast<double>(b1)).epsilon(1e-14));
}

TEST_CASE("temporal c arrays per level") {
    const auto t05 = l21_ab(0.5, 4);
    const auto c0 = l21_c(t05, 0);
    REQUIRE(c0.size() == 1);
    CHECK(c0[0] == doctest::Approx(0.8660254037844386).epsilon(1e-15));

    const auto t1 = l21_ab(1.0, 4);
    const auto c3 = l21_c(t1, 3);
    REQUIRE(c3.size() == 4);
    CHECK(c3[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t s = 1; s <= 3; ++s) CHECK(c3[s] == doctest::Approx(0.0).epsilon(1e-15));

    // independent extended-precision evaluation at theta = 0.5, level 2
    const auto c2 = l21_c(t05, 2);
    const long double sg = 0.75L;
    auto a_of = [&](int l) {
        return l == 0 ? std::pow(sg, 0.5L) : std::pow(l + sg, 0.5L) - std::pow(l - 1.0L + sg, 0.5L);
    };
    auto b_of = [&](int l) {
        return (std::pow(l + sg, 1.5L) - std::pow(l - 1.0L + sg, 1.5L)) / 1.5L -
               0.5L * (std::pow(l + sg, 0.5L) + std::pow(l - 1.0L + sg, 0.5L));
    };
    CHECK(c2[0] == doctest::Approx(static_cast<double>(a_of(0) + b_of(1))).epsilon(1e-14));
    CHECK(c2[1] == doctest::Approx(static_cast<double>(a_of(1) + b_of(2) - b_of(1))).epsilon(1e-14));
    CHECK(c2[2] == doctest::Approx(static_cast<double>(a_of(2) - b_of(2))).epsilon(1e-14));
}

TEST_CASE("temporal c coefficients are positive and strictly decreasing") {
    for (const double theta : {0.1, 0.5, 0.9, 0.99}) {
        const auto table = l21_ab(theta, 1025);
        for (const std::size_t level : {1ul, 2ul, 7ul, 64ul, 511ul, 1024ul}) {
            const auto c = l21_c(table, level);
            CHECK(c[level] > 0.0);
            for (std::size_t s = 0; s < level; ++s) CHECK(c[s] > c[s + 1]);
        }
    }
}

TEST_CASE("leading temporal quotient dominates the stability floor") {
    // q0 = tau^{-theta} c0 / Gamma(2-theta) must exceed 1/(2 T^theta Gamma(1-theta))
    for (const double theta : {0.1, 0.5, 0.9, 0.99}) {
        for (const double tau : {1.0 / 8, 1.0 / 320, 1.0 / 64, 1.0 / 512}) {
            const auto table = l21_ab(theta, 8);
            const double floor = 1.0 / (2.0 * fracstep::gamma(1.0 - theta));  // T = 1
            for (const std::size_t level : {0ul, 1ul, 7ul}) {
                const double c0 = l21_c(table, level)[0];
                const double q0 = std::pow(tau, -theta) * c0 / fracstep::gamma(2.0 - theta);
                CHECK(q0 > floor);
            }
        }
    }
}
