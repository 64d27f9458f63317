#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fracstep {

namespace detail {

// Lanczos approximation (Godfrey's 15-term set, g = 607/128).
// Valid for x >= 0.5; callers handle reflection.
inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr double lanczos_coeff[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

inline double lanczos_series(double x) {
    double a = lanczos_coeff[0];
    for (int i = 1; i < 15; ++i) a += lanczos_coeff[i] / (x + i - 1);
    return a;
}

inline double gamma_positive(double x) {
    // x >= 0.5
    const double t = x + lanczos_g - 0.5;
    const double sqrt_two_pi = 2.5066282746310005024;
    return sqrt_two_pi * lanczos_series(x) * std::pow(t, x - 0.5) * std::exp(-t);
}

inline double log_gamma_positive(double x) {
    // log Gamma(x) for x >= 0.5, without overflow for large x
    const double t = x + lanczos_g - 0.5;
    const double log_sqrt_two_pi = 0.91893853320467274178;
    return log_sqrt_two_pi + std::log(lanczos_series(x)) + (x - 0.5) * std::log(t) - t;
}

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

}  // namespace detail

/// Gamma function. Poles at 0, -1, -2, ... are rejected.
inline double gamma(double x) {
    if (detail::is_nonpositive_integer(x))
        throw std::domain_error("gamma: pole at non-positive integer x = " + std::to_string(x));
    if (x >= 0.5) return detail::gamma_positive(x);
    // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
    const double pi = 3.14159265358979323846;
    return pi / (std::sin(pi * x) * detail::gamma_positive(1.0 - x));
}

/// 1/Gamma(x) for any real x; zero at the poles of Gamma.
inline double reciprocal_gamma(double x) {
    if (detail::is_nonpositive_integer(x)) return 0.0;
    if (x >= 0.5) {
        if (x > 170.0) return std::exp(-detail::log_gamma_positive(x));
        return 1.0 / detail::gamma_positive(x);
    }
    const double pi = 3.14159265358979323846;
    return std::sin(pi * x) * detail::gamma_positive(1.0 - x) / pi;
}

/// Two-parameter Mittag-Leffler function E_{mu,nu}(z) = sum_k z^k / Gamma(mu k + nu),
/// by direct series summation. The series is truncated once the running term drops
/// below 1e-16 of the partial sum, or at k = 200, whichever comes first. Twenty
/// consecutive growing terms signal an out-of-range argument and raise an error.
inline double mittag_leffler(double mu, double nu, double z) {
    if (!(mu > 0.0)) throw std::domain_error("mittag_leffler: mu must be positive");

    double sum = 0.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    int growing = 0;
    for (int k = 0; k <= 200; ++k) {
        const double arg = mu * k + nu;
        double term;
        if (z == 0.0) {
            term = (k == 0) ? reciprocal_gamma(nu) : 0.0;
        } else if (arg > 170.0) {
            // avoid Gamma overflow: |term| = exp(k log|z| - log Gamma(arg)), arg > 0
            const double mag = std::exp(k * std::log(std::abs(z)) - detail::log_gamma_positive(arg));
            term = (z < 0.0 && (k & 1)) ? -mag : mag;
        } else {
            term = std::pow(z, k) * reciprocal_gamma(arg);
        }
        sum += term;

        const double mag = std::abs(term);
        if (mag < 1e-16 * std::abs(sum)) return sum;
        if (mag > prev_mag) {
            if (++growing >= 20)
                throw std::runtime_error("mittag_leffler: series diverging, argument out of range");
        } else {
            growing = 0;
        }
        prev_mag = mag;
    }
    return sum;
}

}  // namespace fracstep
