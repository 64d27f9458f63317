#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracstep {

/// Grunwald coefficients g_0..g_kmax for fractional order `order`:
/// g_0 = 1, g_k = (1 - (order + 1)/k) g_{k-1}.
inline std::vector<double> grunwald_coeffs(double order, std::size_t kmax) {
    std::vector<double> g(kmax + 1);
    g[0] = 1.0;
    for (std::size_t k = 1; k <= kmax; ++k)
        g[k] = (1.0 - (order + 1.0) / static_cast<double>(k)) * g[k - 1];
    return g;
}

/// Weighted-shifted Grunwald weights for a second-order discretization of a
/// Riemann-Liouville derivative of order `order` in (0,1] or (1,2]:
///   omega_0 = order/2,  omega_k = (order/2) g_k + ((2-order)/2) g_{k-1}.
struct WsgdWeights {
    double order = 0.0;
    std::vector<double> g;      // raw Grunwald coefficients, index 0..kmax
    std::vector<double> omega;  // weights, index 0..kmax

    std::size_t kmax() const { return omega.empty() ? 0 : omega.size() - 1; }
};

inline WsgdWeights wsgd_weights(double order, std::size_t kmax) {
    if (kmax < 2) throw std::invalid_argument("wsgd_weights: kmax must be >= 2");
    WsgdWeights w;
    w.order = order;
    w.g = grunwald_coeffs(order, kmax);
    w.omega.resize(kmax + 1);
    w.omega[0] = 0.5 * order;
    const double c1 = 0.5 * order;
    const double c2 = 0.5 * (2.0 - order);
    for (std::size_t k = 1; k <= kmax; ++k)
        w.omega[k] = c1 * w.g[k] + c2 * w.g[k - 1];
    return w;
}

/// Temporal coefficient tables for the second-order Caputo discretization at
/// the offset point t_{j+sigma}, sigma = 1 - theta/2. For theta in (0,1]:
///   a_0 = sigma^{1-theta},  a_l = (l+sigma)^{1-theta} - (l-1+sigma)^{1-theta},
///   b_l = [(l+sigma)^{2-theta} - (l-1+sigma)^{2-theta}]/(2-theta)
///         - [(l+sigma)^{1-theta} + (l-1+sigma)^{1-theta}]/2.
/// At theta = 1 every a_l (l>=1) and b_l vanishes and the stepping collapses
/// to Crank-Nicolson.
struct L21SigmaTable {
    double theta = 0.0;
    double sigma = 0.0;
    double tau = 0.0;       // time step, informational
    std::size_t steps = 0;  // number of time steps M
    std::vector<double> a;  // a[0..M-1]
    std::vector<double> b;  // b[1..M-1]; b[0] unused and kept zero
};

inline L21SigmaTable l21_ab(double theta, std::size_t steps, double tau = 0.0) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("l21_ab: theta must be in (0,1]");
    if (steps < 1) throw std::invalid_argument("l21_ab: steps must be >= 1");
    L21SigmaTable t;
    t.theta = theta;
    t.sigma = 1.0 - 0.5 * theta;
    t.tau = tau;
    t.steps = steps;
    t.a.resize(steps);
    t.b.assign(steps, 0.0);
    const double s = t.sigma;
    const double e1 = 1.0 - theta;
    const double e2 = 2.0 - theta;
    t.a[0] = std::pow(s, e1);
    for (std::size_t l = 1; l < steps; ++l) {
        const double hi = static_cast<double>(l) + s;
        const double lo = static_cast<double>(l) - 1.0 + s;
        t.a[l] = std::pow(hi, e1) - std::pow(lo, e1);
        t.b[l] = (std::pow(hi, e2) - std::pow(lo, e2)) / e2
                 - 0.5 * (std::pow(hi, e1) + std::pow(lo, e1));
    }
    return t;
}

/// Convex-combination coefficients c_0..c_j for time level j:
///   j = 0:      c_0 = a_0
///   j >= 1:     c_0 = a_0 + b_1,
///               c_s = a_s + b_{s+1} - b_s   (1 <= s <= j-1),
///               c_j = a_j - b_j.
/// For theta in (0,1) they satisfy c_0 > c_1 > ... > c_j > 0.
inline std::vector<double> l21_c(const L21SigmaTable& t, std::size_t level) {
    if (level >= t.steps) throw std::out_of_range("l21_c: level must be < steps");
    std::vector<double> c(level + 1);
    if (level == 0) {
        c[0] = t.a[0];
        return c;
    }
    c[0] = t.a[0] + t.b[1];
    for (std::size_t s = 1; s + 1 <= level; ++s) c[s] = t.a[s] + t.b[s + 1] - t.b[s];
    c[level] = t.a[level] - t.b[level];
    return c;
}

}  // namespace fracstep
