#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fracstep/fractional_weights.hpp"
#include "fracstep/structured_linalg.hpp"
#include "support/test_oracles.hpp"

using fracstep::CirculantMatrix;
using fracstep::circulant_matvec;
using fracstep::circulant_solve;
using fracstep::complexd;
using fracstep::dense_from_operator;
using fracstep::dense_from_toeplitz;
using fracstep::DenseMatrix;
using fracstep::dft;
using fracstep::dft_real;
using fracstep::DftPlan;
using fracstep::idft;
using fracstep::lu_solve;
using fracstep::make_circulant;
using fracstep::make_toeplitz;
using fracstep::strang;
using fracstep::ToeplitzMatrix;
using fracstep::toeplitz_matvec;
using fracstep::toeplitz_transpose;

namespace {

std::vector<complexd> to_complex(const std::vector<double>& x) {
    std::vector<complexd> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = complexd(x[i], 0.0);
    return z;
}

double spectrum_rel_err(const std::vector<complexd>& got, const std::vector<complexd>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

TEST_CASE("dft of impulse and constant inputs") {
    const auto impulse = dft(to_complex({1.0, 0.0, 0.0, 0.0}));
    for (const auto& v : impulse) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-14));
    }
    const auto constant = dft(to_complex({1.0, 1.0, 1.0, 1.0}));
    CHECK(constant[0].real() == doctest::Approx(4.0).epsilon(1e-14));
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(constant[k]) < 1e-13);
}

TEST_CASE("dft agrees with direct summation at awkward lengths") {
    auto gen = oracle::rng(1);
    for (const std::size_t n : {2ul, 3ul, 13ul, 100ul, 257ul, 1000ul}) {
        std::vector<complexd> x(n);
        for (auto& v : x) {
            v = complexd(oracle::random_vector(gen, 1)[0], oracle::random_vector(gen, 1)[0]);
        }
        CHECK(spectrum_rel_err(dft(x), oracle::naive_dft(x)) < 1e-12);
    }
}

TEST_CASE("idft inverts dft and Parseval holds") {
    auto gen = oracle::rng(2);
    for (const std::size_t n : {5ul, 16ul, 63ul, 129ul}) {
        std::vector<complexd> x(n);
        for (auto& v : x)
            v = complexd(oracle::random_vector(gen, 1)[0], oracle::random_vector(gen, 1)[0]);
        const auto round_trip = idft(dft(x));
        CHECK(spectrum_rel_err(round_trip, x) < 1e-12);

        double xx = 0.0, yy = 0.0;
        for (const auto& v : x) xx += std::norm(v);
        for (const auto& v : dft(x)) yy += std::norm(v);
        CHECK(yy == doctest::Approx(static_cast<double>(n) * xx).epsilon(1e-12));
    }
}

TEST_CASE("toeplitz matvec on identity and shift patterns") {
    const auto ident = make_toeplitz({1.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
    const std::vector<double> x{1.0, 2.0, 3.0};
    const auto y = toeplitz_matvec(ident, x);
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(y[2] == doctest::Approx(3.0).epsilon(1e-14));

    const auto shift = make_toeplitz({0.0, 1.0, 0.0}, {0.0, 0.0, 0.0});
    const auto s = toeplitz_matvec(shift, x);
    CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s[2] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("toeplitz matvec agrees with dense products on random inputs") {
    auto gen = oracle::rng(3);
    std::uniform_int_distribution<std::size_t> size_dist(2, 512);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = size_dist(gen);
        std::vector<double> col = oracle::random_vector(gen, n);
        std::vector<double> row = oracle::random_vector(gen, n);
        row[0] = col[0];
        const auto t = make_toeplitz(col, row);
        const auto x = oracle::random_vector(gen, n);
        const auto dense = oracle::toeplitz_dense(col, row);
        CHECK(oracle::rel_err(toeplitz_matvec(t, x), oracle::matvec(dense, x)) < 1e-12);
    }
}

TEST_CASE("toeplitz transpose swaps column and row") {
    auto gen = oracle::rng(4);
    std::vector<double> col = oracle::random_vector(gen, 9);
    std::vector<double> row = oracle::random_vector(gen, 9);
    row[0] = col[0];
    const auto t = make_toeplitz(col, row);
    const auto tt = toeplitz_transpose(t);
    const auto dense_t = dense_from_toeplitz(t);
    const auto dense_tt = dense_from_toeplitz(tt);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j) CHECK(dense_tt(i, j) == dense_t(j, i));

    // the operator pattern: first column [w1, w2, ...], first row [w1, w0, 0...]
    const auto w = fracstep::wsgd_weights(0.6, 9);
    std::vector<double> pc(8), pr(8, 0.0);
    for (std::size_t k = 0; k < 8; ++k) pc[k] = w.omega[k + 1];
    pr[0] = w.omega[1];
    pr[1] = w.omega[0];
    const auto a = make_toeplitz(pc, pr);
    const auto at = toeplitz_transpose(a);
    CHECK(at.first_col == pr);
    CHECK(at.first_row == pc);
}

TEST_CASE("strang projection follows the wrap-around rule") {
    const auto t4 = make_toeplitz({1.5, 2.0, 3.0, 4.0}, {1.5, 5.0, 6.0, 7.0});
    const auto s4 = strang(t4);
    CHECK(s4.first_col[0] == doctest::Approx(1.5));
    CHECK(s4.first_col[1] == doctest::Approx(2.0));
    CHECK(s4.first_col[2] == doctest::Approx(0.0));
    CHECK(s4.first_col[3] == doctest::Approx(5.0));

    const auto trid = make_toeplitz({2.0, -1.0, 0.0, 0.0, 0.0}, {2.0, -1.0, 0.0, 0.0, 0.0});
    const auto s5 = strang(trid);
    const std::vector<double> expect{2.0, -1.0, 0.0, 0.0, -1.0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(s5.first_col[i] == doctest::Approx(expect[i]));
}

TEST_CASE("strang of the advection weight pattern keeps the central diagonals") {
    const std::size_t n = 9;
    const auto w = fracstep::wsgd_weights(0.6, n + 1);
    std::vector<double> pc(n), pr(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) pc[k] = w.omega[k + 1];
    pr[0] = w.omega[1];
    pr[1] = w.omega[0];
    const auto a = make_toeplitz(pc, pr);
    const auto s = strang(a);

    // dense cross-check: central diagonals copied, wrapped around
    const auto dense_a = dense_from_toeplitz(a);
    for (std::size_t j = 0; j < n; ++j) {
        double expect;
        if (2 * j < n)
            expect = dense_a(j, 0);
        else if (2 * j == n)
            expect = 0.0;
        else
            expect = dense_a(0, n - j);
        CHECK(s.first_col[j] == doctest::Approx(expect).epsilon(1e-15));
    }
    // first column layout: w1..w_{floor(N/2)}, zeros, w0 at the end (N = n+1 here)
    CHECK(s.first_col[0] == doctest::Approx(w.omega[1]));
    CHECK(s.first_col[n - 1] == doctest::Approx(w.omega[0]));

    // transpose compatibility: strang(T^t) = strang(T)^t
    const auto st = strang(toeplitz_transpose(a));
    for (std::size_t k = 0; k < n; ++k)
        CHECK(st.first_col[k] == doctest::Approx(s.first_col[(n - k) % n]).epsilon(1e-15));
}

TEST_CASE("strang of a symmetric toeplitz is a symmetric circulant") {
    auto gen = oracle::rng(5);
    std::vector<double> col = oracle::random_vector(gen, 12);
    const auto t = make_toeplitz(col, col);
    const auto s = strang(t);
    for (std::size_t k = 1; k < 12; ++k)
        CHECK(s.first_col[k] == doctest::Approx(s.first_col[12 - k]).epsilon(1e-15));
}

TEST_CASE("circulant spectrum reproduces the dense product") {
    auto gen = oracle::rng(6);
    for (const std::size_t n : {4ul, 7ul, 12ul}) {
        const auto c = make_circulant(oracle::random_vector(gen, n));
        const auto x = oracle::random_vector(gen, n);
        oracle::Dense dense(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dense(i, j) = c.first_col[(i + n - j) % n];
        CHECK(oracle::rel_err(circulant_matvec(c, x), oracle::matvec(dense, x)) < 1e-12);
    }
}

TEST_CASE("circulant solve on identity and closed-form 2x2 systems") {
    const auto ident = make_circulant({1.0, 0.0, 0.0, 0.0});
    const std::vector<double> b{4.0, -1.0, 2.5, 0.0};
    CHECK(oracle::rel_err(circulant_solve(ident, b), b) < 1e-13);

    const auto two = make_circulant({2.0, 1.0});
    const std::vector<double> rhs{5.0, 4.0};
    const auto x = circulant_solve(two, rhs);
    CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("circulant solve matches a dense LU oracle") {
    auto gen = oracle::rng(7);
    std::vector<double> col = oracle::random_vector(gen, 12);
    col[0] += 12.0;  // diagonal dominance
    const auto c = make_circulant(col);
    const auto b = oracle::random_vector(gen, 12);
    oracle::Dense dense(12);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) dense(i, j) = col[(i + 12 - j) % 12];
    CHECK(oracle::rel_err(circulant_solve(c, b), oracle::gauss_solve(dense, b)) < 1e-12);
}

TEST_CASE("circulant solve rejects singular spectra") {
    // the all-ones circulant has a zero eigenvalue away from k = 0
    const auto ones = make_circulant({1.0, 1.0, 1.0});
    CHECK_THROWS_AS(circulant_solve(ones, {1.0, 2.0, 3.0}), std::runtime_error);
}

TEST_CASE("dense materialization from operator applies") {
    const auto ident = dense_from_operator([](const std::vector<double>& x) { return x; }, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(ident(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    auto gen = oracle::rng(8);
    std::vector<double> col = oracle::random_vector(gen, 10);
    std::vector<double> row = oracle::random_vector(gen, 10);
    row[0] = col[0];
    const auto t = make_toeplitz(col, row);
    const auto built =
        dense_from_operator([&](const std::vector<double>& x) { return toeplitz_matvec(t, x); }, 10);
    const auto direct = oracle::toeplitz_dense(col, row);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j)
            CHECK(built(i, j) == doctest::Approx(direct(i, j)).epsilon(1e-12));
}

TEST_CASE("lu_solve on hand-checked and random systems") {
    DenseMatrix ident(3);
    for (std::size_t i = 0; i < 3; ++i) ident(i, i) = 1.0;
    const std::vector<double> b3{1.0, -2.0, 0.5};
    CHECK(oracle::rel_err(lu_solve(ident, b3), b3) < 1e-15);

    DenseMatrix two(2);
    two(0, 0) = 2.0;
    two(0, 1) = 1.0;
    two(1, 0) = 1.0;
    two(1, 1) = 3.0;
    const auto x = lu_solve(two, {3.0, 4.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));

    auto gen = oracle::rng(9);
    DenseMatrix a(50);
    for (std::size_t i = 0; i < 50; ++i) {
        const auto r = oracle::random_vector(gen, 50);
        for (std::size_t j = 0; j < 50; ++j) a(i, j) = r[j];
        a(i, i) += 50.0;
    }
    const auto rhs = oracle::random_vector(gen, 50);
    const auto sol = lu_solve(a, rhs);
    std::vector<double> resid(50, 0.0);
    for (std::size_t i = 0; i < 50; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 50; ++j) s += a(i, j) * sol[j];
        resid[i] = s - rhs[i];
    }
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        rn += resid[i] * resid[i];
        bn += rhs[i] * rhs[i];
    }
    CHECK(std::sqrt(rn / bn) < 1e-10);
}

TEST_CASE("lu_solve rejects singular matrices") {
    DenseMatrix sing(3);
    for (std::size_t j = 0; j < 3; ++j) {
        sing(0, j) = 1.0;
        sing(1, j) = 2.0;  // row 1 = 2 * row 0
        sing(2, j) = static_cast<double>(j);
    }
    CHECK_THROWS_AS(lu_solve(sing, {1.0, 2.0, 3.0}), std::runtime_error);
}

TEST_CASE("strang spectra of the weight-pattern operators have signed real parts") {
    // advection pattern (order in (0,1)): all real parts strictly positive;
    // diffusion pattern (order in (1,2)): all strictly negative.
    for (const std::size_t n : {8ul, 63ul, 255ul, 1024ul}) {
        const auto build = [n](double order) {
            const auto w = fracstep::wsgd_weights(order, n + 1);
            std::vector<double> pc(n), pr(n, 0.0);
            for (std::size_t k = 0; k < n; ++k) pc[k] = w.omega[k + 1];
            pr[0] = w.omega[1];
            pr[1] = w.omega[0];
            return make_toeplitz(pc, pr);
        };
        for (const double alpha : {0.1, 0.4, 0.6, 0.8, 0.99}) {
            const auto s = strang(build(alpha));
            const auto st = strang(toeplitz_transpose(build(alpha)));
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(s.eigenvalues[k].real() > 0.0);
                CHECK(st.eigenvalues[k].real() > 0.0);
            }
        }
        for (const double beta : {1.1, 1.5, 1.8, 1.9, 1.99}) {
            const auto s = strang(build(beta));
            const auto st = strang(toeplitz_transpose(build(beta)));
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(s.eigenvalues[k].real() < 0.0);
                CHECK(st.eigenvalues[k].real() < 0.0);
            }
        }
    }
}
