#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracstep/fractional_weights.hpp"
#include "fracstep/krylov.hpp"
#include "fracstep/special_functions.hpp"
#include "fracstep/structured_linalg.hpp"

namespace fracstep {

using TimeFn = std::function<double(double)>;
using SpaceFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;   // (x, t)
using ReactionFn = std::function<double(double, double, double)>;  // (u, x, t)

// ---------------------------------------------------------------------------
// Problem statement
// ---------------------------------------------------------------------------

/// Uniform space-time mesh on [0, length] x [0, duration] with N space
/// intervals and M time steps. Unknowns live at the N-1 interior nodes.
struct Grid {
    double length = 1.0;
    double duration = 1.0;
    std::size_t space_intervals = 0;  // N
    std::size_t time_steps = 0;       // M

    double h() const { return length / static_cast<double>(space_intervals); }
    double tau() const { return duration / static_cast<double>(time_steps); }
    std::size_t interior() const { return space_intervals - 1; }
    double x(std::size_t i) const { return static_cast<double>(i) * h(); }
    double t(double level) const { return level * tau(); }
};

inline Grid make_grid(double length, double duration, std::size_t space_intervals,
                      std::size_t time_steps) {
    if (space_intervals < 4) throw std::invalid_argument("make_grid: need at least 4 space intervals");
    if (time_steps < 1) throw std::invalid_argument("make_grid: need at least 1 time step");
    if (!(length > 0.0) || !(duration > 0.0))
        throw std::invalid_argument("make_grid: domain extents must be positive");
    return Grid{length, duration, space_intervals, time_steps};
}

struct FractionalOrders {
    double theta = 0.5;  // temporal order, (0,1]
    double alpha = 0.5;  // advection order, (0,1]
    double beta = 1.5;   // diffusion order, (1,2]

    double sigma() const { return 1.0 - 0.5 * theta; }
};

inline void validate_orders(const FractionalOrders& o) {
    if (!(o.theta > 0.0 && o.theta <= 1.0))
        throw std::invalid_argument("fractional orders: theta must be in (0,1]");
    if (!(o.alpha > 0.0 && o.alpha <= 1.0))
        throw std::invalid_argument("fractional orders: alpha must be in (0,1]");
    if (!(o.beta > 1.0 && o.beta <= 2.0))
        throw std::invalid_argument("fractional orders: beta must be in (1,2]");
}

/// Non-negative time-dependent advection (d) and diffusion (e) coefficients.
struct CoefficientSet {
    TimeFn d_plus, d_minus, e_plus, e_minus;
};

struct LinearProblem {
    FractionalOrders orders;
    CoefficientSet coeffs;
    SpaceTimeFn source;   // f(x, t)
    SpaceFn initial;      // u(x, 0)
    SpaceTimeFn exact;    // optional reference solution; may be empty
};

struct NonlinearProblem {
    FractionalOrders orders;
    CoefficientSet coeffs;
    ReactionFn reaction;  // g(u, x, t)
    SpaceFn initial;
    SpaceTimeFn exact;
    std::optional<double> lipschitz_hint;
};

// ---------------------------------------------------------------------------
// Solution storage
// ---------------------------------------------------------------------------

/// Full space-time field u[level][i] for level = 0..M, i = 0..N. The boundary
/// columns i = 0 and i = N are identically zero; only interior values can be
/// written.
class SolutionField {
public:
    SolutionField(std::size_t space_points, std::size_t levels)
        : nx_(space_points), values_(space_points * levels, 0.0) {
        if (space_points < 3 || levels < 1) throw std::invalid_argument("SolutionField: bad shape");
    }

    std::size_t space_points() const { return nx_; }
    std::size_t levels() const { return values_.size() / nx_; }

    double value(std::size_t level, std::size_t i) const { return values_[level * nx_ + i]; }

    void set_interior(std::size_t level, const std::vector<double>& interior) {
        if (interior.size() != nx_ - 2) throw std::invalid_argument("SolutionField: bad interior size");
        double* row = &values_[level * nx_];
        for (std::size_t i = 0; i < interior.size(); ++i) row[i + 1] = interior[i];
    }

    std::vector<double> interior(std::size_t level) const {
        const double* row = &values_[level * nx_];
        return std::vector<double>(row + 1, row + nx_ - 1);
    }

private:
    std::size_t nx_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Per-level operators
// ---------------------------------------------------------------------------

/// Combined interior spatial Toeplitz operator at time level j,
///   G = (d+/h^a) A_a + (d-/h^a) A_a^T - (e+/h^b) A_b - (e-/h^b) A_b^T,
/// where A_g has first column [w_1, w_2, ...] and first row [w_1, w_0, 0, ...]
/// in the corresponding WSGD weights, and the coefficient functions are
/// sampled at t_{j+sigma}.
inline ToeplitzMatrix combine_spatial_toeplitz(const CoefficientSet& coeffs, double alpha,
                                               double beta, const WsgdWeights& wa,
                                               const WsgdWeights& wb, const Grid& grid,
                                               double sigma, std::size_t level) {
    const std::size_t n = grid.interior();
    if (wa.kmax() < n || wb.kmax() < n)
        throw std::invalid_argument("combine_spatial_toeplitz: weights too short");
    const double t_eval = grid.t(static_cast<double>(level) + sigma);
    const double h = grid.h();
    const double da = coeffs.d_plus(t_eval) / std::pow(h, alpha);
    const double db = coeffs.d_minus(t_eval) / std::pow(h, alpha);
    const double ea = coeffs.e_plus(t_eval) / std::pow(h, beta);
    const double eb = coeffs.e_minus(t_eval) / std::pow(h, beta);

    auto col_w = [](const WsgdWeights& w, std::size_t k) { return w.omega[k + 1]; };
    auto row_w = [](const WsgdWeights& w, std::size_t k) {
        if (k == 0) return w.omega[1];
        return k == 1 ? w.omega[0] : 0.0;
    };

    std::vector<double> col(n), row(n);
    for (std::size_t k = 0; k < n; ++k) {
        col[k] = da * col_w(wa, k) + db * row_w(wa, k) - ea * col_w(wb, k) - eb * row_w(wb, k);
        row[k] = da * row_w(wa, k) + db * col_w(wa, k) - ea * row_w(wb, k) - eb * col_w(wb, k);
    }
    return ToeplitzMatrix{std::move(col), std::move(row)};
}

/// Spectrum of the circulant preconditioner zeta*I + sigma*s(G), obtained from
/// the Strang projection of the combined spatial operator. All real parts are
/// positive for admissible problems; a vanishing spectrum raises an error.
inline std::vector<complexd> build_preconditioner(const ToeplitzMatrix& spatial, double zeta,
                                                  double sigma) {
    const CirculantMatrix s = strang(spatial);
    std::vector<complexd> eig(s.size());
    for (std::size_t k = 0; k < eig.size(); ++k) eig[k] = zeta + sigma * s.eigenvalues[k];
    detail::check_spectrum_invertible(eig, "build_preconditioner");
    return eig;
}

/// Assembled operators for one time level: M = zeta*I + sigma*G applied to the
/// new iterate and B = zeta*I - (1-sigma)*G to the previous one, both through
/// the cached FFT embedding of G, plus the circulant preconditioner spectrum.
class LevelOperators {
public:
    LevelOperators(std::size_t level, double zeta, double sigma, ToeplitzMatrix spatial)
        : level_(level), zeta_(zeta), sigma_(sigma), spatial_(std::move(spatial)),
          product_(spatial_), precond_(build_preconditioner(spatial_, zeta_, sigma_)) {}

    std::size_t level() const { return level_; }
    std::size_t size() const { return spatial_.size(); }
    double zeta() const { return zeta_; }
    double sigma() const { return sigma_; }
    const ToeplitzMatrix& spatial() const { return spatial_; }
    const CirculantPreconditioner& preconditioner() const { return precond_; }

    std::vector<double> apply_M(const std::vector<double>& x) const {
        std::vector<double> y = product_.apply(x);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = zeta_ * x[i] + sigma_ * y[i];
        return y;
    }

    std::vector<double> apply_B(const std::vector<double>& x) const {
        std::vector<double> y = product_.apply(x);
        const double w = 1.0 - sigma_;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = zeta_ * x[i] - w * y[i];
        return y;
    }

private:
    std::size_t level_;
    double zeta_;
    double sigma_;
    ToeplitzMatrix spatial_;
    ToeplitzOperator product_;
    CirculantPreconditioner precond_;
};

struct MOperator {
    const LevelOperators* lv;
    std::size_t size() const { return lv->size(); }
    std::vector<double> apply(const std::vector<double>& x) const { return lv->apply_M(x); }
};

/// Temporal memory term at level j:
///   scale * sum_{s=0}^{j-1} c_{j-s} (u^{s+1} - u^s)
/// over interior nodes, with the level-j coefficient array c and
/// scale = tau^{-theta} / Gamma(2-theta). Empty sum at j = 0.
inline std::vector<double> history_term(const std::vector<double>& c, const SolutionField& u,
                                        std::size_t level, double scale) {
    const std::size_t n = u.space_points() - 2;
    std::vector<double> acc(n, 0.0);
    if (level == 0) return acc;
    if (c.size() != level + 1) throw std::invalid_argument("history_term: bad coefficient array");
    for (std::size_t s = 0; s < level; ++s) {
        const double w = c[level - s];
        for (std::size_t i = 0; i < n; ++i)
            acc[i] += w * (u.value(s + 1, i + 1) - u.value(s, i + 1));
    }
    for (double& v : acc) v *= scale;
    return acc;
}

// ---------------------------------------------------------------------------
// Time steppers
// ---------------------------------------------------------------------------

enum class SolverChoice { lu, pbicgstab, pgpbicor };

struct SolveOptions {
    SolverChoice solver = SolverChoice::pbicgstab;
    double tol = 1e-12;
    std::size_t maxit = 1000;
    std::size_t gp_m = 3;
    std::size_t gp_ell = 1;
    double outer_tol = 1e-12;
    std::size_t outer_maxit = 50;
};

namespace detail {

inline DenseMatrix materialize_m(const LevelOperators& lv) {
    DenseMatrix m = dense_from_toeplitz(lv.spatial());
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            m(i, j) = lv.sigma() * m(i, j) + (i == j ? lv.zeta() : 0.0);
    return m;
}

inline std::pair<std::vector<double>, SolveReport> solve_level_system(
    const LevelOperators& lv, const std::vector<double>& rhs, const SolveOptions& opts,
    const DenseMatrix* dense_m) {
    switch (opts.solver) {
        case SolverChoice::lu: {
            const auto t0 = std::chrono::steady_clock::now();
            SolveReport rep;
            std::vector<double> u =
                dense_m != nullptr ? lu_solve(*dense_m, rhs) : lu_solve(materialize_m(lv), rhs);
            rep.converged = true;
            rep.wall_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return {std::move(u), rep};
        }
        case SolverChoice::pbicgstab: {
            const std::vector<double> x0(rhs.size(), 0.0);
            return bicgstab(MOperator{&lv}, lv.preconditioner(), rhs, x0, opts.tol, opts.maxit);
        }
        case SolverChoice::pgpbicor: {
            const std::vector<double> x0(rhs.size(), 0.0);
            return gpbicor(MOperator{&lv}, lv.preconditioner(), rhs, x0, opts.tol, opts.maxit,
                           opts.gp_m, opts.gp_ell);
        }
    }
    throw std::logic_error("solve_level_system: unknown solver");
}

}  // namespace detail

/// Advance one level of the linear scheme: solve M u^{j+1} = B u^j - history + f.
inline std::pair<std::vector<double>, SolveReport> step_linear(const LevelOperators& lv,
                                                               const std::vector<double>& u_prev,
                                                               const std::vector<double>& history,
                                                               const std::vector<double>& f_vec,
                                                               const SolveOptions& opts) {
    std::vector<double> rhs = lv.apply_B(u_prev);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += f_vec[i] - history[i];
    return detail::solve_level_system(lv, rhs, opts, nullptr);
}

struct NonlinearStepResult {
    std::vector<double> u_next;
    std::size_t outer_iterations = 0;     // productive sweeps; the confirming pass is not counted
    double inner_iterations_avg = 0.0;    // mean Krylov iterations per inner solve
    bool converged = false;
};

/// Advance one level of the nonlinear scheme by frozen-source sweeps:
/// start from u^j (j = 0) or the extrapolation 2u^j - u^{j-1} (j >= 1),
/// re-evaluate g at sigma*u^{(l)} + (1-sigma)*u^j, and solve the linear level
/// system until successive iterates agree to outer_tol in the relative
/// max-norm. Every inner solve starts from the zero vector.
inline NonlinearStepResult step_nonlinear(const LevelOperators& lv,
                                          const std::vector<double>& u_prev,
                                          const std::vector<double>* u_prev2,
                                          const ReactionFn& reaction,
                                          const std::vector<double>& x_interior, double t_eval,
                                          const std::vector<double>& history,
                                          const SolveOptions& opts) {
    const std::size_t n = u_prev.size();
    NonlinearStepResult out;

    std::vector<double> guess(n);
    if (u_prev2 == nullptr)
        guess = u_prev;
    else
        for (std::size_t i = 0; i < n; ++i) guess[i] = 2.0 * u_prev[i] - (*u_prev2)[i];

    std::vector<double> base = lv.apply_B(u_prev);
    for (std::size_t i = 0; i < n; ++i) base[i] -= history[i];

    std::optional<DenseMatrix> dense_m;
    if (opts.solver == SolverChoice::lu) dense_m = detail::materialize_m(lv);

    const double sigma = lv.sigma();
    std::vector<double> rhs(n);
    double inner_total = 0.0;
    std::size_t solves = 0;

    for (std::size_t sweep = 0; sweep < opts.outer_maxit; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u_mid = sigma * guess[i] + (1.0 - sigma) * u_prev[i];
            rhs[i] = base[i] + reaction(u_mid, x_interior[i], t_eval);
        }
        auto [u_new, rep] =
            detail::solve_level_system(lv, rhs, opts, dense_m ? &*dense_m : nullptr);
        if (!rep.converged) {
            out.u_next = std::move(u_new);
            return out;
        }
        inner_total += rep.iterations;
        ++solves;

        double diff = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diff = std::max(diff, std::abs(u_new[i] - guess[i]));
            mag = std::max(mag, std::abs(u_new[i]));
        }
        guess = std::move(u_new);
        if (diff / std::max(mag, 1e-300) < opts.outer_tol) {
            out.converged = true;
            break;
        }
    }

    out.u_next = std::move(guess);
    out.outer_iterations = solves > 1 ? solves - 1 : solves;
    out.inner_iterations_avg = solves > 0 ? inner_total / static_cast<double>(solves) : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Full runs
// ---------------------------------------------------------------------------

namespace detail {

struct RunSetup {
    WsgdWeights wa, wb;
    L21SigmaTable table;
    double scale = 0.0;  // tau^{-theta} / Gamma(2-theta)
    std::vector<double> x_interior;
};

inline RunSetup prepare_run(const FractionalOrders& orders, const Grid& grid) {
    validate_orders(orders);
    RunSetup s;
    const std::size_t n = grid.interior();
    s.wa = wsgd_weights(orders.alpha, n);
    s.wb = wsgd_weights(orders.beta, n);
    s.table = l21_ab(orders.theta, grid.time_steps, grid.tau());
    s.scale = std::pow(grid.tau(), -orders.theta) / gamma(2.0 - orders.theta);
    s.x_interior.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.x_interior[i] = grid.x(i + 1);
    return s;
}

inline std::vector<double> sample_initial(const SpaceFn& u0, const RunSetup& s) {
    std::vector<double> v(s.x_interior.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u0(s.x_interior[i]);
    return v;
}

}  // namespace detail

/// Run the full linear time stepper. Operators and preconditioners are rebuilt
/// at every level because the coefficients are time-dependent; the weight
/// tables are computed once. The aggregate report carries the per-level
/// average Krylov iteration count and the total wall time measured from
/// operator generation.
inline std::pair<SolutionField, SolveReport> solve_linear(const LinearProblem& problem,
                                                          const Grid& grid,
                                                          const SolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const detail::RunSetup setup = detail::prepare_run(problem.orders, grid);
    const double sigma = problem.orders.sigma();
    const std::size_t levels = grid.time_steps;

    SolutionField field(grid.space_intervals + 1, levels + 1);
    field.set_interior(0, detail::sample_initial(problem.initial, setup));

    SolveReport agg;
    agg.converged = true;
    double iter_sum = 0.0;

    std::vector<double> f_vec(grid.interior());
    for (std::size_t j = 0; j < levels; ++j) {
        const std::vector<double> c = l21_c(setup.table, j);
        const double zeta = setup.scale * c[0];
        LevelOperators lv(j, zeta, sigma,
                          combine_spatial_toeplitz(problem.coeffs, problem.orders.alpha,
                                                   problem.orders.beta, setup.wa, setup.wb, grid,
                                                   sigma, j));
        const std::vector<double> hist = history_term(c, field, j, setup.scale);
        const double t_eval = grid.t(static_cast<double>(j) + sigma);
        for (std::size_t i = 0; i < f_vec.size(); ++i)
            f_vec[i] = problem.source(setup.x_interior[i], t_eval);

        auto [u_next, rep] = step_linear(lv, field.interior(j), hist, f_vec, opts);
        field.set_interior(j + 1, u_next);
        iter_sum += rep.iterations;
        if (!rep.converged) {
            agg.converged = false;
            break;
        }
    }

    agg.iterations = iter_sum / static_cast<double>(levels);
    agg.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(field), std::move(agg)};
}

/// Run the full nonlinear time stepper. The aggregate report carries the
/// average number of outer sweeps (outer_iterations) and the average inner
/// Krylov iteration count per solve (iterations).
inline std::pair<SolutionField, SolveReport> solve_nonlinear(const NonlinearProblem& problem,
                                                             const Grid& grid,
                                                             const SolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const detail::RunSetup setup = detail::prepare_run(problem.orders, grid);
    const double sigma = problem.orders.sigma();
    const std::size_t levels = grid.time_steps;

    SolutionField field(grid.space_intervals + 1, levels + 1);
    field.set_interior(0, detail::sample_initial(problem.initial, setup));

    SolveReport agg;
    agg.converged = true;
    double outer_sum = 0.0, inner_sum = 0.0;

    std::vector<double> u_prev = field.interior(0);
    std::vector<double> u_prev2;
    for (std::size_t j = 0; j < levels; ++j) {
        const std::vector<double> c = l21_c(setup.table, j);
        const double zeta = setup.scale * c[0];
        LevelOperators lv(j, zeta, sigma,
                          combine_spatial_toeplitz(problem.coeffs, problem.orders.alpha,
                                                   problem.orders.beta, setup.wa, setup.wb, grid,
                                                   sigma, j));
        const std::vector<double> hist = history_term(c, field, j, setup.scale);
        const double t_eval = grid.t(static_cast<double>(j) + sigma);

        NonlinearStepResult res =
            step_nonlinear(lv, u_prev, j >= 1 ? &u_prev2 : nullptr, problem.reaction,
                           setup.x_interior, t_eval, hist, opts);
        field.set_interior(j + 1, res.u_next);
        outer_sum += static_cast<double>(res.outer_iterations);
        inner_sum += res.inner_iterations_avg;
        if (!res.converged) {
            agg.converged = false;
            break;
        }

        u_prev2 = std::move(u_prev);
        u_prev = field.interior(j + 1);
    }

    agg.outer_iterations = outer_sum / static_cast<double>(levels);
    agg.iterations = inner_sum / static_cast<double>(levels);
    agg.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(field), std::move(agg)};
}

}  // namespace fracstep
