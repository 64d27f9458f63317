#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracstep {

using complexd = std::complex<double>;

inline constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

namespace detail {

// In-place radix-2 decimation-in-time transform. `tw` holds e^{-2 pi i k / n}
// for k < n/2; the inverse pass conjugates the twiddles and scales by 1/n.
inline void fft_radix2(std::vector<complexd>& a, const std::vector<std::size_t>& bitrev,
                       const std::vector<complexd>& tw, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bitrev[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const complexd w = inverse ? std::conj(tw[k * step]) : tw[k * step];
                const complexd u = a[base + k];
                const complexd v = a[base + k + half] * w;
                a[base + k] = u + v;
                a[base + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= scale;
    }
}

}  // namespace detail

/// Discrete Fourier transform machinery for a fixed length n (any n >= 1).
/// Forward convention: X_k = sum_j x_j e^{-2 pi i jk/n}, unnormalized; the
/// inverse carries the 1/n factor. Powers of two go through an iterative
/// radix-2 kernel; other lengths use Bluestein's chirp reformulation on a
/// power-of-two convolution. A plan is immutable after construction and safe
/// for concurrent use.
class DftPlan {
public:
    explicit DftPlan(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("DftPlan: length must be >= 1");
        if (is_pow2(n)) {
            init_pow2_tables(n, bitrev_, tw_);
        } else {
            m_ = next_pow2(2 * n - 1);
            init_pow2_tables(m_, bitrev_, tw_);
            const double pi = 3.14159265358979323846;
            chirp_.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                // j^2 mod 2n keeps the phase argument small and exact
                const unsigned long long q = (static_cast<unsigned long long>(j) * j) % (2ull * n);
                const double ang = -pi * static_cast<double>(q) / static_cast<double>(n);
                chirp_[j] = complexd(std::cos(ang), std::sin(ang));
            }
            filter_dft_.assign(m_, complexd(0.0, 0.0));
            filter_dft_[0] = std::conj(chirp_[0]);
            for (std::size_t j = 1; j < n; ++j)
                filter_dft_[j] = filter_dft_[m_ - j] = std::conj(chirp_[j]);
            detail::fft_radix2(filter_dft_, bitrev_, tw_, false);
        }
    }

    std::size_t size() const { return n_; }

    std::vector<complexd> forward(std::vector<complexd> x) const {
        if (x.size() != n_) throw std::invalid_argument("DftPlan::forward: length mismatch");
        if (m_ == 0) {
            detail::fft_radix2(x, bitrev_, tw_, false);
            return x;
        }
        std::vector<complexd> a(m_, complexd(0.0, 0.0));
        for (std::size_t j = 0; j < n_; ++j) a[j] = x[j] * chirp_[j];
        detail::fft_radix2(a, bitrev_, tw_, false);
        for (std::size_t k = 0; k < m_; ++k) a[k] *= filter_dft_[k];
        detail::fft_radix2(a, bitrev_, tw_, true);
        x.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) x[k] = a[k] * chirp_[k];
        return x;
    }

    std::vector<complexd> inverse(std::vector<complexd> y) const {
        if (y.size() != n_) throw std::invalid_argument("DftPlan::inverse: length mismatch");
        if (m_ == 0) {
            detail::fft_radix2(y, bitrev_, tw_, true);
            return y;
        }
        for (auto& z : y) z = std::conj(z);
        y = forward(std::move(y));
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& z : y) z = std::conj(z) * scale;
        return y;
    }

private:
    static void init_pow2_tables(std::size_t n, std::vector<std::size_t>& bitrev,
                                 std::vector<complexd>& tw) {
        bitrev.assign(n, 0);
        for (std::size_t i = 1; i < n; ++i)
            bitrev[i] = (bitrev[i >> 1] >> 1) | ((i & 1) ? (n >> 1) : 0);
        tw.resize(std::max<std::size_t>(n / 2, 1));
        const double pi = 3.14159265358979323846;
        for (std::size_t k = 0; k < tw.size(); ++k) {
            const double ang = -2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
            tw[k] = complexd(std::cos(ang), std::sin(ang));
        }
    }

    std::size_t n_;
    std::size_t m_ = 0;  // Bluestein convolution length, 0 on the radix-2 path
    std::vector<std::size_t> bitrev_;
    std::vector<complexd> tw_;
    std::vector<complexd> chirp_;
    std::vector<complexd> filter_dft_;
};

inline std::vector<complexd> dft(const std::vector<complexd>& x) {
    return DftPlan(x.size()).forward(x);
}

inline std::vector<complexd> idft(const std::vector<complexd>& y) {
    return DftPlan(y.size()).inverse(y);
}

inline std::vector<complexd> dft_real(const std::vector<double>& x) {
    std::vector<complexd> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = complexd(x[i], 0.0);
    return dft(z);
}

// ---------------------------------------------------------------------------
// Toeplitz matrices
// ---------------------------------------------------------------------------

/// Dense-free Toeplitz representation: T(i,j) = t_{i-j}, stored as the first
/// column (t_0..t_{n-1}) and first row (t_0, t_{-1}, ..., t_{-(n-1)}).
struct ToeplitzMatrix {
    std::vector<double> first_col;
    std::vector<double> first_row;

    std::size_t size() const { return first_col.size(); }

    double entry(std::size_t i, std::size_t j) const {
        return i >= j ? first_col[i - j] : first_row[j - i];
    }
};

inline ToeplitzMatrix make_toeplitz(std::vector<double> first_col, std::vector<double> first_row) {
    if (first_col.empty() || first_col.size() != first_row.size())
        throw std::invalid_argument("make_toeplitz: column/row lengths must match and be nonzero");
    if (first_col[0] != first_row[0])
        throw std::invalid_argument("make_toeplitz: first_col[0] must equal first_row[0]");
    return ToeplitzMatrix{std::move(first_col), std::move(first_row)};
}

inline ToeplitzMatrix toeplitz_transpose(const ToeplitzMatrix& t) {
    return ToeplitzMatrix{t.first_row, t.first_col};
}

/// Repeated Toeplitz products via circulant embedding: the matrix is embedded
/// into a circulant of length m = next_pow2(2n-1) whose first column is
/// [t_0, ..., t_{n-1}, 0...0, t_{-(n-1)}, ..., t_{-1}], and each product costs
/// two length-m transforms against the cached embedding spectrum.
class ToeplitzOperator {
public:
    explicit ToeplitzOperator(const ToeplitzMatrix& t)
        : n_(t.size()), m_(next_pow2(2 * t.size() - 1)), plan_(m_) {
        std::vector<complexd> c(m_, complexd(0.0, 0.0));
        for (std::size_t k = 0; k < n_; ++k) c[k] = complexd(t.first_col[k], 0.0);
        for (std::size_t k = 1; k < n_; ++k) c[m_ - k] = complexd(t.first_row[k], 0.0);
        embed_dft_ = plan_.forward(std::move(c));
    }

    std::size_t size() const { return n_; }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != n_) throw std::invalid_argument("ToeplitzOperator::apply: length mismatch");
        std::vector<complexd> z(m_, complexd(0.0, 0.0));
        for (std::size_t i = 0; i < n_; ++i) z[i] = complexd(x[i], 0.0);
        z = plan_.forward(std::move(z));
        for (std::size_t k = 0; k < m_; ++k) z[k] *= embed_dft_[k];
        z = plan_.inverse(std::move(z));
        std::vector<double> y(n_);
        for (std::size_t i = 0; i < n_; ++i) y[i] = z[i].real();
        return y;
    }

private:
    std::size_t n_;
    std::size_t m_;
    DftPlan plan_;
    std::vector<complexd> embed_dft_;
};

inline std::vector<double> toeplitz_matvec(const ToeplitzMatrix& t, const std::vector<double>& x) {
    return ToeplitzOperator(t).apply(x);
}

// ---------------------------------------------------------------------------
// Circulant matrices
// ---------------------------------------------------------------------------

/// Circulant carrier: first column plus its cached spectrum
/// eigenvalues[k] = sum_j first_col[j] e^{-2 pi i jk/n}.
struct CirculantMatrix {
    std::vector<double> first_col;
    std::vector<complexd> eigenvalues;

    std::size_t size() const { return first_col.size(); }
};

inline CirculantMatrix make_circulant(std::vector<double> first_col) {
    if (first_col.empty()) throw std::invalid_argument("make_circulant: empty column");
    CirculantMatrix c;
    c.eigenvalues = dft_real(first_col);
    c.first_col = std::move(first_col);
    return c;
}

/// Strang circulant approximation of a Toeplitz matrix: keep the central
/// diagonals and wrap them around,
///   s_j = t_j           for 0 <= j < n/2,
///   s_j = 0             for j = n/2 when n is even,
///   s_j = t_{j-n}       for n/2 < j < n.
inline CirculantMatrix strang(const ToeplitzMatrix& t) {
    const std::size_t n = t.size();
    if (n < 2) throw std::invalid_argument("strang: matrix must have size >= 2");
    std::vector<double> col(n, 0.0);
    col[0] = t.first_col[0];
    for (std::size_t j = 1; j < n; ++j) {
        if (2 * j < n)
            col[j] = t.first_col[j];
        else if (2 * j == n)
            col[j] = 0.0;
        else
            col[j] = t.first_row[n - j];
    }
    return make_circulant(std::move(col));
}

inline std::vector<double> circulant_matvec(const CirculantMatrix& c, const std::vector<double>& x) {
    if (x.size() != c.size()) throw std::invalid_argument("circulant_matvec: length mismatch");
    DftPlan plan(c.size());
    std::vector<complexd> z(c.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = complexd(x[i], 0.0);
    z = plan.forward(std::move(z));
    for (std::size_t k = 0; k < z.size(); ++k) z[k] *= c.eigenvalues[k];
    z = plan.inverse(std::move(z));
    std::vector<double> y(c.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = z[i].real();
    return y;
}

namespace detail {

inline void check_spectrum_invertible(const std::vector<complexd>& eig, const char* who) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& e : eig) {
        const double m = std::abs(e);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    if (!(lo > 1e-14 * hi))
        throw std::runtime_error(std::string(who) + ": circulant spectrum is numerically singular");
}

inline std::vector<double> spectral_solve(const DftPlan& plan, const std::vector<complexd>& eig,
                                          const std::vector<double>& b, const char* who) {
    double max_b = 0.0;
    for (const double v : b) max_b = std::max(max_b, std::abs(v));
    std::vector<complexd> z(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) z[i] = complexd(b[i], 0.0);
    z = plan.forward(std::move(z));
    for (std::size_t k = 0; k < z.size(); ++k) z[k] /= eig[k];
    z = plan.inverse(std::move(z));
    double max_re = 0.0, max_im = 0.0;
    for (const auto& v : z) {
        max_re = std::max(max_re, std::abs(v.real()));
        max_im = std::max(max_im, std::abs(v.imag()));
    }
    // roundoff residue scales with whichever of input and output dominates
    if (max_im > 1e-10 * std::max({max_re, max_b, 1e-300}))
        throw std::runtime_error(std::string(who) + ": non-negligible imaginary residue");
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i].real();
    return x;
}

}  // namespace detail

/// Solve C x = b by spectral division, x = idft(dft(b) / eigenvalues). The
/// imaginary residue of the back transform is verified below 1e-10 relative
/// before being discarded.
inline std::vector<double> circulant_solve(const CirculantMatrix& c, const std::vector<double>& b) {
    if (b.size() != c.size()) throw std::invalid_argument("circulant_solve: length mismatch");
    detail::check_spectrum_invertible(c.eigenvalues, "circulant_solve");
    DftPlan plan(c.size());
    return detail::spectral_solve(plan, c.eigenvalues, b, "circulant_solve");
}

/// Preconditioner backed by a circulant spectrum; apply_inverse performs one
/// forward and one inverse transform per call. Immutable after construction,
/// safe to share across concurrent solves.
class CirculantPreconditioner {
public:
    explicit CirculantPreconditioner(std::vector<complexd> eigenvalues)
        : plan_(eigenvalues.size()), eigen_(std::move(eigenvalues)) {
        detail::check_spectrum_invertible(eigen_, "CirculantPreconditioner");
    }

    std::size_t size() const { return eigen_.size(); }

    std::vector<double> apply_inverse(const std::vector<double>& r) const {
        if (r.size() != eigen_.size())
            throw std::invalid_argument("CirculantPreconditioner: length mismatch");
        return detail::spectral_solve(plan_, eigen_, r, "CirculantPreconditioner");
    }

    const std::vector<complexd>& eigenvalues() const { return eigen_; }

private:
    DftPlan plan_;
    std::vector<complexd> eigen_;
};

// ---------------------------------------------------------------------------
// Dense fallback and LU baseline
// ---------------------------------------------------------------------------

struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // row-major, n*n

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Materialize an operator column by column through unit-vector applies.
template <class Apply>
DenseMatrix dense_from_operator(Apply&& apply, std::size_t n) {
    DenseMatrix m(n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = apply(e);
        if (col.size() != n) throw std::invalid_argument("dense_from_operator: bad apply output");
        for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
        e[j] = 0.0;
    }
    return m;
}

inline DenseMatrix dense_from_toeplitz(const ToeplitzMatrix& t) {
    DenseMatrix m(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) m(i, j) = t.entry(i, j);
    return m;
}

inline DenseMatrix dense_from_circulant(const CirculantMatrix& c) {
    const std::size_t n = c.size();
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = c.first_col[(i + n - j) % n];
    return m;
}

/// Direct solve through LU factorization with partial pivoting.
inline std::vector<double> lu_solve(const DenseMatrix& m, std::vector<double> b) {
    const std::size_t n = m.n;
    if (b.size() != n) throw std::invalid_argument("lu_solve: length mismatch");
    std::vector<double> lu = m.a;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    double amax = 0.0;
    for (const double v : lu) amax = std::max(amax, std::abs(v));

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double cand = std::abs(lu[i * n + k]);
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (!(best > 1e-14 * amax)) throw std::runtime_error("lu_solve: matrix is numerically singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
            std::swap(perm[k], perm[piv]);
        }
        const double pivot = lu[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double mult = lu[i * n + k] / pivot;
            lu[i * n + k] = mult;
            double* ri = &lu[i * n];
            const double* rk = &lu[k * n];
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= mult * rk[j];
        }
    }

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[perm[i]];
        const double* ri = &lu[i * n];
        for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        const double* ri = &lu[ii * n];
        for (std::size_t j = ii + 1; j < n; ++j) s -= ri[j] * x[j];
        x[ii] = s / ri[ii];
    }
    return x;
}

}  // namespace fracstep
