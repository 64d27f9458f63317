#pragma once

#include <cmath>
#include <stdexcept>

#include "fracstep/special_functions.hpp"
#include "fracstep/tsfade_scheme.hpp"

namespace fracstep {

namespace detail {

inline double bump(double x) {  // x^2 (1-x)^2
    const double y = x * (1.0 - x);
    return y * y;
}

// Gamma-ratio prefactors of the two-sided fractional derivatives of
// x^2 - 2x^3 + x^4 for a given order.
struct SpatialBracket {
    double c2, c3, c4;

    explicit SpatialBracket(double order)
        : c2(gamma(3.0) / gamma(3.0 - order)),
          c3(2.0 * gamma(4.0) / gamma(4.0 - order)),
          c4(gamma(5.0) / gamma(5.0 - order)) {}

    // cp * left-derivative part + cm * right-derivative part at x
    double eval(double order, double x, double cp, double cm) const {
        const double xr = 1.0 - x;
        return c2 * (cp * std::pow(x, 2.0 - order) + cm * std::pow(xr, 2.0 - order))
               - c3 * (cp * std::pow(x, 3.0 - order) + cm * std::pow(xr, 3.0 - order))
               + c4 * (cp * std::pow(x, 4.0 - order) + cm * std::pow(xr, 4.0 - order));
    }
};

}  // namespace detail

/// Linear benchmark problem on [0,1]x[0,1] with closed-form solution
/// u(x,t) = t^{theta+2} x^2 (1-x)^2 and time-dependent coefficients
/// d+(t) = e^t, d-(t) = 3e^{-t}, e+(t) = (1+t)^2, e-(t) = 1+t^2.
inline LinearProblem example1(double theta, double alpha, double beta) {
    LinearProblem p;
    p.orders = FractionalOrders{theta, alpha, beta};
    validate_orders(p.orders);
    p.coeffs.d_plus = [](double t) { return std::exp(t); };
    p.coeffs.d_minus = [](double t) { return 3.0 * std::exp(-t); };
    p.coeffs.e_plus = [](double t) { return (1.0 + t) * (1.0 + t); };
    p.coeffs.e_minus = [](double t) { return 1.0 + t * t; };

    const double time_c = gamma(3.0 + theta) / gamma(3.0);
    const detail::SpatialBracket adv(alpha);
    const detail::SpatialBracket dif(beta);
    const CoefficientSet cs = p.coeffs;
    p.source = [=](double x, double t) {
        const double phi = std::pow(t, theta + 2.0);
        return time_c * t * t * detail::bump(x)
               + phi * (adv.eval(alpha, x, cs.d_plus(t), cs.d_minus(t))
                        - dif.eval(beta, x, cs.e_plus(t), cs.e_minus(t)));
    };
    p.initial = [](double) { return 0.0; };
    p.exact = [theta](double x, double t) { return std::pow(t, theta + 2.0) * detail::bump(x); };
    return p;
}

/// Nonlinear benchmark problem on [0,1]x[0,1] with closed-form solution
/// u(x,t) = (t^{2+theta} + e^{2t}) x^2 (1-x)^2, reaction y(u) = sin(u)/4, and
/// coefficients d+(t) = sech(t), d-(t) = 4 sech(t), e+(t) = (2+cos t)^2,
/// e-(t) = 2 + cos^2 t. The source balances the reaction so that the
/// closed-form u solves the equation exactly.
inline NonlinearProblem example2(double theta, double alpha, double beta) {
    NonlinearProblem p;
    p.orders = FractionalOrders{theta, alpha, beta};
    validate_orders(p.orders);
    auto sech = [](double t) { return 1.0 / std::cosh(t); };
    p.coeffs.d_plus = sech;
    p.coeffs.d_minus = [sech](double t) { return 4.0 * sech(t); };
    p.coeffs.e_plus = [](double t) { return (2.0 + std::cos(t)) * (2.0 + std::cos(t)); };
    p.coeffs.e_minus = [](double t) { return 2.0 + std::cos(t) * std::cos(t); };

    const double time_c = gamma(3.0 + theta) / gamma(3.0);
    const detail::SpatialBracket adv(alpha);
    const detail::SpatialBracket dif(beta);
    const CoefficientSet cs = p.coeffs;
    auto phi = [theta](double t) { return std::pow(t, 2.0 + theta) + std::exp(2.0 * t); };
    p.reaction = [=](double u, double x, double t) {
        const double v = detail::bump(x);
        const double caputo_phi =
            time_c * t * t + 2.0 * std::pow(t, 1.0 - theta) * mittag_leffler(1.0, 2.0 - theta, 2.0 * t);
        return 0.25 * std::sin(u) + caputo_phi * v
               + phi(t) * (adv.eval(alpha, x, cs.d_plus(t), cs.d_minus(t))
                           - dif.eval(beta, x, cs.e_plus(t), cs.e_minus(t)))
               - 0.25 * std::sin(phi(t) * v);
    };
    p.initial = [](double x) { return detail::bump(x); };
    p.exact = [phi](double x, double t) { return phi(t) * detail::bump(x); };
    return p;
}

/// Error norms of a computed field against a reference solution:
/// c_norm is the max over every space-time node, l2_max the largest discrete
/// L2 norm sqrt(h * sum_i v_i^2) over the time levels.
struct ErrorSummary {
    double c_norm = 0.0;
    double l2_max = 0.0;
};

inline ErrorSummary error_norms(const SolutionField& field, const SpaceTimeFn& exact,
                                const Grid& grid) {
    if (!exact) throw std::invalid_argument("error_norms: no reference solution");
    ErrorSummary e;
    const double h = grid.h();
    for (std::size_t j = 0; j < field.levels(); ++j) {
        const double t = grid.t(static_cast<double>(j));
        double sq = 0.0;
        for (std::size_t i = 0; i < field.space_points(); ++i) {
            const double xi = exact(grid.x(i), t) - field.value(j, i);
            e.c_norm = std::max(e.c_norm, std::abs(xi));
            if (i > 0 && i + 1 < field.space_points()) sq += xi * xi;
        }
        e.l2_max = std::max(e.l2_max, std::sqrt(h * sq));
    }
    return e;
}

/// Observed convergence order between two refinement levels:
/// log(err_coarse/err_fine) / log(step_coarse/step_fine).
inline double convergence_order(double err_coarse, double err_fine, double step_coarse,
                                double step_fine) {
    if (!(err_coarse > 0.0) || !(err_fine > 0.0) || !(step_coarse > 0.0) || !(step_fine > 0.0))
        throw std::domain_error("convergence_order: inputs must be positive");
    if (step_coarse == step_fine)
        throw std::domain_error("convergence_order: steps must differ");
    return std::log(err_coarse / err_fine) / std::log(step_coarse / step_fine);
}

}  // namespace fracstep
