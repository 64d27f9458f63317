#pragma once

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fracstep/problems.hpp"
#include "fracstep/tsfade_scheme.hpp"

namespace fracstep::cli {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    int example = 1;  // 1 = linear benchmark, 2 = nonlinear benchmark
    double theta = 0.5;
    double alpha = 0.6;
    double beta = 1.8;
    std::vector<std::pair<std::size_t, std::size_t>> grids;  // (N, M) pairs
    std::string solver = "pbicgstab";                        // lu | pbicgstab | pgpbicor
    std::size_t gp_m = 3;
    std::size_t gp_ell = 1;
    double tol = 1e-12;
    double outer_tol = 1e-12;
    std::string out;  // output path; empty writes to stdout

    // export-matrix parameters
    std::string which = "M";  // M | B | P | PinvM
    std::size_t level = 0;
};

/// Parse a grid ladder of the form "N:M,N:M,...".
inline std::vector<std::pair<std::size_t, std::size_t>> parse_grids(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> grids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("grids: expected N:M pairs separated by commas");
        const unsigned long n = std::stoul(item.substr(0, colon));
        const unsigned long m = std::stoul(item.substr(colon + 1));
        grids.emplace_back(n, m);
    }
    if (grids.empty()) throw std::invalid_argument("grids: empty ladder");
    return grids;
}

inline void validate_config(const RunConfig& c) {
    if (c.example != 1 && c.example != 2)
        throw std::invalid_argument("config: example must be 1 or 2");
    validate_orders(FractionalOrders{c.theta, c.alpha, c.beta});
    if (!(c.tol > 0.0 && c.tol < 1.0)) throw std::invalid_argument("config: tol must be in (0,1)");
    if (!(c.outer_tol > 0.0 && c.outer_tol < 1.0))
        throw std::invalid_argument("config: outer_tol must be in (0,1)");
    if (c.solver != "lu" && c.solver != "pbicgstab" && c.solver != "pgpbicor")
        throw std::invalid_argument("config: solver must be lu, pbicgstab or pgpbicor");
    for (const auto& [n, m] : c.grids)
        if (n < 4 || m < 4) throw std::invalid_argument("config: grids need N >= 4 and M >= 4");
}

inline SolverChoice solver_from_name(const std::string& name) {
    if (name == "lu") return SolverChoice::lu;
    if (name == "pbicgstab") return SolverChoice::pbicgstab;
    if (name == "pgpbicor") return SolverChoice::pgpbicor;
    throw std::invalid_argument("unknown solver: " + name);
}

inline SolveOptions options_from_config(const RunConfig& c) {
    SolveOptions o;
    o.solver = solver_from_name(c.solver);
    o.tol = c.tol;
    o.outer_tol = c.outer_tol;
    o.gp_m = c.gp_m;
    o.gp_ell = c.gp_ell;
    return o;
}

inline std::size_t worker_count() {
    const char* env = std::getenv("FRACSTEP_THREADS");
    if (env == nullptr) return 1;
    const long v = std::strtol(env, nullptr, 10);
    return v > 1 ? static_cast<std::size_t>(v) : 1;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

namespace fmt {

inline std::string table(double v) {  // report-table precision
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4e", v);
    return buf;
}

inline std::string full(double v) {  // lossless data export
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string seconds(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace fmt

struct CommandResult {
    std::string output;
    bool ok = true;
};

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Dump Grunwald coefficients and WSGD weights as CSV.
inline CommandResult cmd_weights(double order, std::size_t kmax) {
    if (!(order > 0.0 && order <= 2.0))
        throw std::invalid_argument("weights: gamma must be in (0,2]");
    const WsgdWeights w = wsgd_weights(order, kmax < 2 ? 2 : kmax);
    std::string out = "k,g,omega\n";
    for (std::size_t k = 0; k <= kmax; ++k) {
        out += std::to_string(k);
        out += ',';
        out += fmt::full(w.g[k]);
        out += ',';
        out += fmt::full(w.omega[k]);
        out += '\n';
    }
    return {std::move(out), true};
}

/// Dump the temporal coefficient array c_0..c_level for one time level.
inline CommandResult cmd_weights_temporal(double theta, std::size_t steps, std::size_t level) {
    const L21SigmaTable table = l21_ab(theta, steps);
    const std::vector<double> c = l21_c(table, level);
    std::string out = "s,c\n";
    for (std::size_t s = 0; s < c.size(); ++s) {
        out += std::to_string(s);
        out += ',';
        out += fmt::full(c[s]);
        out += '\n';
    }
    return {std::move(out), true};
}

namespace detail {

struct LadderEntry {
    double h = 0.0, tau = 0.0;
    ErrorSummary err;
    bool converged = false;
};

inline LadderEntry run_ladder_entry(const RunConfig& cfg, std::size_t n, std::size_t m) {
    const Grid grid = make_grid(1.0, 1.0, n, m);
    const SolveOptions opts = options_from_config(cfg);
    LadderEntry e;
    e.h = grid.h();
    e.tau = grid.tau();
    if (cfg.example == 1) {
        const LinearProblem p = example1(cfg.theta, cfg.alpha, cfg.beta);
        auto [field, rep] = solve_linear(p, grid, opts);
        e.err = error_norms(field, p.exact, grid);
        e.converged = rep.converged;
    } else {
        const NonlinearProblem p = example2(cfg.theta, cfg.alpha, cfg.beta);
        auto [field, rep] = solve_nonlinear(p, grid, opts);
        e.err = error_norms(field, p.exact, grid);
        e.converged = rep.converged;
    }
    return e;
}

}  // namespace detail

/// Refinement study over the configured grid ladder. One CSV row per grid
/// with both error norms and the observed orders between consecutive rows;
/// order cells are blank on the first row and whenever the steps coincide.
/// Ladder entries may run on FRACSTEP_THREADS workers; rows are emitted in
/// input order either way.
inline CommandResult cmd_converge(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.grids.size() < 2)
        throw std::invalid_argument("converge: need a ladder of at least 2 grids");

    std::vector<detail::LadderEntry> entries(cfg.grids.size());
    const std::size_t workers = std::min(worker_count(), cfg.grids.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < cfg.grids.size(); ++i)
            entries[i] = detail::run_ladder_entry(cfg, cfg.grids[i].first, cfg.grids[i].second);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < cfg.grids.size(); i += workers)
                        entries[i] =
                            detail::run_ladder_entry(cfg, cfg.grids[i].first, cfg.grids[i].second);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    std::string out = "h,tau,c_norm,co_c,l2_max,co_l2\n";
    bool ok = true;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        ok = ok && e.converged;
        std::string co_c, co_l2;
        if (i > 0) {
            const auto& prev = entries[i - 1];
            const double step_prev = prev.tau != e.tau ? prev.tau : prev.h;
            const double step_cur = prev.tau != e.tau ? e.tau : e.h;
            if (step_prev != step_cur && prev.err.c_norm > 0.0 && e.err.c_norm > 0.0)
                co_c = fmt::table(convergence_order(prev.err.c_norm, e.err.c_norm, step_prev, step_cur));
            if (step_prev != step_cur && prev.err.l2_max > 0.0 && e.err.l2_max > 0.0)
                co_l2 = fmt::table(convergence_order(prev.err.l2_max, e.err.l2_max, step_prev, step_cur));
        }
        if (!e.converged) {  // diagnostic row, then stop the ladder
            out += fmt::table(e.h) + "," + fmt::table(e.tau) + ",solver-failed,,,\n";
            break;
        }
        out += fmt::table(e.h) + "," + fmt::table(e.tau) + "," + fmt::table(e.err.c_norm) + "," +
               co_c + "," + fmt::table(e.err.l2_max) + "," + co_l2 + "\n";
    }
    return {std::move(out), ok};
}

/// Solve on a single grid (the first ladder entry) and export the full field
/// as `x,t,u` CSV.
inline CommandResult cmd_solve(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.grids.empty()) throw std::invalid_argument("solve: need one grid");
    const auto [n, m] = cfg.grids.front();
    const Grid grid = make_grid(1.0, 1.0, n, m);
    const SolveOptions opts = options_from_config(cfg);

    SolutionField field(grid.space_intervals + 1, grid.time_steps + 1);
    bool ok = false;
    if (cfg.example == 1) {
        auto [f, rep] = solve_linear(example1(cfg.theta, cfg.alpha, cfg.beta), grid, opts);
        field = std::move(f);
        ok = rep.converged;
    } else {
        auto [f, rep] = solve_nonlinear(example2(cfg.theta, cfg.alpha, cfg.beta), grid, opts);
        field = std::move(f);
        ok = rep.converged;
    }

    std::string out = "x,t,u\n";
    for (std::size_t j = 0; j < field.levels(); ++j)
        for (std::size_t i = 0; i < field.space_points(); ++i) {
            out += fmt::full(grid.x(i)) + "," + fmt::full(grid.t(static_cast<double>(j))) + "," +
                   fmt::full(field.value(j, i)) + "\n";
        }
    return {std::move(out), ok};
}

/// Timed comparison of the dense LU baseline against the configured
/// preconditioned Krylov solver, one CSV row per grid. Timing starts at
/// operator generation for both paths. Bench runs are always sequential.
inline CommandResult cmd_bench(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.solver == "lu")
        throw std::invalid_argument("bench: solver must be pbicgstab or pgpbicor");
    if (cfg.grids.empty()) throw std::invalid_argument("bench: need at least one grid");

    const bool nonlinear = cfg.example == 2;
    std::string out = nonlinear ? "h,tau,time_direct,time_iterative,iter1,iter2,speed_up\n"
                                : "h,tau,time_direct,time_iterative,iter,speed_up\n";
    bool ok = true;
    for (const auto& [n, m] : cfg.grids) {
        if (n - 1 > 8192)
            throw std::runtime_error("bench: dense baseline refuses interior dimension > 8192");
        const Grid grid = make_grid(1.0, 1.0, n, m);
        SolveOptions direct = options_from_config(cfg);
        direct.solver = SolverChoice::lu;
        const SolveOptions iterative = options_from_config(cfg);

        SolveReport rep_direct, rep_iter;
        if (nonlinear) {
            const NonlinearProblem p = example2(cfg.theta, cfg.alpha, cfg.beta);
            rep_direct = solve_nonlinear(p, grid, direct).second;
            rep_iter = solve_nonlinear(p, grid, iterative).second;
        } else {
            const LinearProblem p = example1(cfg.theta, cfg.alpha, cfg.beta);
            rep_direct = solve_linear(p, grid, direct).second;
            rep_iter = solve_linear(p, grid, iterative).second;
        }
        ok = ok && rep_direct.converged && rep_iter.converged;

        const double speed_up = rep_direct.wall_time / rep_iter.wall_time;
        out += fmt::table(grid.h()) + "," + fmt::table(grid.tau()) + "," +
               fmt::seconds(rep_direct.wall_time) + "," + fmt::seconds(rep_iter.wall_time) + ",";
        if (nonlinear)
            out += fmt::table(rep_iter.outer_iterations) + "," + fmt::table(rep_iter.iterations) + ",";
        else
            out += fmt::table(rep_iter.iterations) + ",";
        out += fmt::table(speed_up) + "\n";
    }
    return {std::move(out), ok};
}

/// Materialize one per-level matrix (M, B, the circulant preconditioner P, or
/// the preconditioned operator P^{-1}M) as dense row-major CSV.
inline CommandResult cmd_export_matrix(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.grids.empty()) throw std::invalid_argument("export-matrix: need one grid");
    const auto [nspace, msteps] = cfg.grids.front();
    const std::size_t n = nspace - 1;
    if (n > 512) throw std::runtime_error("export-matrix: interior dimension capped at 512");
    const Grid grid = make_grid(1.0, 1.0, nspace, msteps);
    if (cfg.level >= grid.time_steps)
        throw std::invalid_argument("export-matrix: level out of range");

    const FractionalOrders orders{cfg.theta, cfg.alpha, cfg.beta};
    CoefficientSet coeffs = cfg.example == 1 ? example1(cfg.theta, cfg.alpha, cfg.beta).coeffs
                                             : example2(cfg.theta, cfg.alpha, cfg.beta).coeffs;
    const WsgdWeights wa = wsgd_weights(orders.alpha, n);
    const WsgdWeights wb = wsgd_weights(orders.beta, n);
    const L21SigmaTable table = l21_ab(orders.theta, grid.time_steps, grid.tau());
    const double scale = std::pow(grid.tau(), -orders.theta) / gamma(2.0 - orders.theta);
    const std::vector<double> c = l21_c(table, cfg.level);
    const LevelOperators lv(cfg.level, scale * c[0], orders.sigma(),
                            combine_spatial_toeplitz(coeffs, orders.alpha, orders.beta, wa, wb,
                                                     grid, orders.sigma(), cfg.level));

    DenseMatrix mat;
    if (cfg.which == "M") {
        mat = dense_from_operator([&](const std::vector<double>& x) { return lv.apply_M(x); }, n);
    } else if (cfg.which == "B") {
        mat = dense_from_operator([&](const std::vector<double>& x) { return lv.apply_B(x); }, n);
    } else if (cfg.which == "P") {
        const auto& eig = lv.preconditioner().eigenvalues();
        std::vector<complexd> col = DftPlan(n).inverse(eig);
        std::vector<double> first_col(n);
        for (std::size_t i = 0; i < n; ++i) first_col[i] = col[i].real();
        mat = dense_from_circulant(CirculantMatrix{std::move(first_col), eig});
    } else if (cfg.which == "PinvM") {
        mat = dense_from_operator(
            [&](const std::vector<double>& x) {
                return lv.preconditioner().apply_inverse(lv.apply_M(x));
            },
            n);
    } else {
        throw std::invalid_argument("export-matrix: which must be M, B, P or PinvM");
    }

    std::string out;
    for (std::size_t i = 0; i < mat.n; ++i) {
        for (std::size_t j = 0; j < mat.n; ++j) {
            out += fmt::full(mat(i, j));
            out += (j + 1 < mat.n) ? ',' : '\n';
        }
    }
    return {std::move(out), true};
}

}  // namespace fracstep::cli
