#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fracstep {

template <class A>
concept LinearOperatorLike = requires(const A& a, const std::vector<double>& x) {
    { a.size() } -> std::convertible_to<std::size_t>;
    { a.apply(x) } -> std::convertible_to<std::vector<double>>;
};

template <class P>
concept PreconditionerLike = requires(const P& p, const std::vector<double>& r) {
    { p.size() } -> std::convertible_to<std::size_t>;
    { p.apply_inverse(r) } -> std::convertible_to<std::vector<double>>;
};

struct IdentityPreconditioner {
    std::size_t n = 0;
    std::size_t size() const { return n; }
    std::vector<double> apply_inverse(const std::vector<double>& r) const { return r; }
};

/// Raised when an inner-product denominator underflows and the recurrences
/// cannot continue.
struct SolverBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Outcome of one iterative (or direct) solve. For aggregated time-stepping
/// runs, `iterations` holds the per-level average and `outer_iterations` the
/// average number of linearization sweeps.
struct SolveReport {
    bool converged = false;
    double iterations = 0.0;
    double outer_iterations = 0.0;
    std::vector<double> relative_residuals;
    double wall_time = 0.0;  // seconds
};

namespace blas {

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double nrm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

inline double nrm_inf(const std::vector<double>& x) {
    double m = 0.0;
    for (const double v : x) m = std::max(m, std::abs(v));
    return m;
}

// y += a*x
inline void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace blas

inline constexpr double krylov_breakdown_eps = 1e-290;

/// Right-preconditioned BiCGSTAB (van der Vorst). The recursive residual
/// tracks the original system, so the stopping rule
/// ||r_k||_2 / ||r_0||_2 < tol applies to the unpreconditioned problem.
/// Convergence at the intermediate residual counts as half an iteration.
template <LinearOperatorLike A, PreconditionerLike P>
std::pair<std::vector<double>, SolveReport> bicgstab(const A& op, const P& prec,
                                                     const std::vector<double>& b,
                                                     const std::vector<double>& x0, double tol,
                                                     std::size_t maxit = 1000) {
    const std::size_t n = op.size();
    if (b.size() != n || x0.size() != n) throw std::invalid_argument("bicgstab: length mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("bicgstab: tol must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    std::vector<double> x = x0;

    std::vector<double> r = op.apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double r0norm = blas::nrm2(r);
    if (r0norm == 0.0) {
        rep.converged = true;
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return {std::move(x), rep};
    }

    const std::vector<double> rshadow = r;
    std::vector<double> p(n, 0.0), v(n, 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    for (std::size_t k = 1; k <= maxit; ++k) {
        const double rho_next = blas::dot(rshadow, r);
        if (std::abs(rho_next) < krylov_breakdown_eps) throw SolverBreakdown("bicgstab: rho breakdown");
        const double beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);

        const std::vector<double> phat = prec.apply_inverse(p);
        v = op.apply(phat);
        const double gamma = blas::dot(rshadow, v);
        if (std::abs(gamma) < krylov_breakdown_eps) throw SolverBreakdown("bicgstab: alpha breakdown");
        alpha = rho / gamma;

        std::vector<double> s = r;
        blas::axpy(-alpha, v, s);
        const double srel = blas::nrm2(s) / r0norm;
        if (srel < tol) {
            blas::axpy(alpha, phat, x);
            rep.relative_residuals.push_back(srel);
            rep.iterations = static_cast<double>(k) - 0.5;
            rep.converged = true;
            break;
        }

        const std::vector<double> shat = prec.apply_inverse(s);
        const std::vector<double> t = op.apply(shat);
        const double tt = blas::dot(t, t);
        if (tt < krylov_breakdown_eps) throw SolverBreakdown("bicgstab: omega breakdown");
        omega = blas::dot(t, s) / tt;
        if (std::abs(omega) < krylov_breakdown_eps) throw SolverBreakdown("bicgstab: omega breakdown");

        blas::axpy(alpha, phat, x);
        blas::axpy(omega, shat, x);
        r = s;
        blas::axpy(-omega, t, r);

        const double rel = blas::nrm2(r) / r0norm;
        rep.relative_residuals.push_back(rel);
        rep.iterations = static_cast<double>(k);
        if (rel < tol) {
            rep.converged = true;
            break;
        }
    }

    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(x), rep};
}

template <LinearOperatorLike A>
std::pair<std::vector<double>, SolveReport> bicgstab(const A& op, const std::vector<double>& b,
                                                     const std::vector<double>& x0, double tol,
                                                     std::size_t maxit = 1000) {
    return bicgstab(op, IdentityPreconditioner{op.size()}, b, x0, tol, maxit);
}

/// Generalized product-type solver based on BiCOR, GPBiCOR(m, ell), with a
/// preconditioner K applied through solves. The shadow residual is fixed to
/// r0* = A K^{-1} r0. Each loop pass costs two operator products and two
/// preconditioner solves; a pass alternates between m stabilized steps and
/// ell two-parameter steps according to mod(n, m + ell) < m.
template <LinearOperatorLike A, PreconditionerLike P>
std::pair<std::vector<double>, SolveReport> gpbicor(const A& op, const P& prec,
                                                    const std::vector<double>& b,
                                                    const std::vector<double>& x0, double tol,
                                                    std::size_t maxit = 1000, std::size_t m = 3,
                                                    std::size_t ell = 1) {
    const std::size_t n = op.size();
    if (b.size() != n || x0.size() != n) throw std::invalid_argument("gpbicor: length mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("gpbicor: tol must be positive");
    if (m < 1 || ell < 1) throw std::invalid_argument("gpbicor: m and ell must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    std::vector<double> x = x0;

    std::vector<double> r = op.apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double r0norm = blas::nrm2(r);
    if (r0norm == 0.0) {
        rep.converged = true;
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return {std::move(x), rep};
    }

    std::vector<double> e = prec.apply_inverse(r);
    std::vector<double> ehat = op.apply(e);
    const std::vector<double> rshadow = ehat;  // A K^{-1} r0

    const std::vector<double> zero(n, 0.0);
    std::vector<double> t_prev = zero, w_prev = zero, u_prev = zero, uhat_prev = zero;
    std::vector<double> q_prev = zero, z_prev = zero, s_prev = zero;
    std::vector<double> p = zero, phat = zero;
    double beta_prev = 0.0;

    std::vector<double> t(n), y(n), s(n), w(n), u(n), uhat(n), z(n);

    for (std::size_t it = 0; it < maxit; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = e[i] + beta_prev * (p[i] - u_prev[i]);
            phat[i] = ehat[i] + beta_prev * (phat[i] - uhat_prev[i]);
        }
        const std::vector<double> h = prec.apply_inverse(phat);
        const std::vector<double> g = op.apply(h);

        // alpha couples the shadow residual to the A-images (as in the beta
        // update), which keeps the BiCOR coupling scalars consistent
        const double denom = blas::dot(rshadow, g);
        if (std::abs(denom) < krylov_breakdown_eps) throw SolverBreakdown("gpbicor: alpha breakdown");
        const double alpha = blas::dot(rshadow, ehat) / denom;

        for (std::size_t i = 0; i < n; ++i) t[i] = r[i] - alpha * phat[i];
        const double t_rel = blas::nrm2(t) / r0norm;
        if (t_rel < tol) {  // intermediate residual already converged
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
            rep.relative_residuals.push_back(t_rel);
            rep.iterations = static_cast<double>(it) + 0.5;
            rep.converged = true;
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            y[i] = t_prev[i] - t[i] - alpha * q_prev[i];
            s[i] = e[i] - alpha * h[i];
            w[i] = ehat[i] - alpha * g[i];
        }

        double xi, eta;
        if (it % (m + ell) < m || it == 0) {
            const double ww = blas::dot(w, w);
            if (ww < krylov_breakdown_eps) throw SolverBreakdown("gpbicor: xi breakdown");
            xi = blas::dot(w, t) / ww;
            eta = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = xi * h[i];
                uhat[i] = xi * g[i];
                z[i] = xi * e[i] - alpha * u[i];
                r[i] = t[i] - xi * w[i];
            }
        } else {
            const double ww = blas::dot(w, w);
            const double yy = blas::dot(y, y);
            const double wt = blas::dot(w, t);
            const double yt = blas::dot(y, t);
            const double wy = blas::dot(w, y);
            const double det = ww * yy - wy * wy;
            if (std::abs(det) < krylov_breakdown_eps) throw SolverBreakdown("gpbicor: xi/eta breakdown");
            xi = (yy * wt - yt * wy) / det;
            eta = (ww * yt - wy * wt) / det;
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = xi * h[i] + eta * (s_prev[i] - e[i] + beta_prev * u_prev[i]);
                uhat[i] = xi * g[i] + eta * (w_prev[i] - ehat[i] + beta_prev * uhat_prev[i]);
                z[i] = xi * e[i] + eta * z_prev[i] - alpha * u[i];
                r[i] = t[i] - eta * y[i] - xi * w[i];
            }
        }

        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i] + z[i];

        const double rel = blas::nrm2(r) / r0norm;
        rep.relative_residuals.push_back(rel);
        rep.iterations = static_cast<double>(it + 1);
        if (rel < tol) {
            rep.converged = true;
            break;
        }

        const double ehat_inner = blas::dot(rshadow, ehat);
        if (std::abs(ehat_inner) < krylov_breakdown_eps || std::abs(xi) < krylov_breakdown_eps)
            throw SolverBreakdown("gpbicor: beta breakdown");
        const std::vector<double> e_next = prec.apply_inverse(r);
        const std::vector<double> ehat_next = op.apply(e_next);
        const double beta = (alpha / xi) * blas::dot(rshadow, ehat_next) / ehat_inner;

        for (std::size_t i = 0; i < n; ++i) q_prev[i] = w[i] + beta * phat[i];
        t_prev = t;
        w_prev = w;
        u_prev = u;
        uhat_prev = uhat;
        s_prev = s;
        z_prev = z;
        beta_prev = beta;
        e = e_next;
        ehat = ehat_next;
    }

    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(x), rep};
}

template <LinearOperatorLike A>
std::pair<std::vector<double>, SolveReport> gpbicor(const A& op, const std::vector<double>& b,
                                                    const std::vector<double>& x0, double tol,
                                                    std::size_t maxit = 1000, std::size_t m = 3,
                                                    std::size_t ell = 1) {
    return gpbicor(op, IdentityPreconditioner{op.size()}, b, x0, tol, maxit, m, ell);
}

}  // namespace fracstep
