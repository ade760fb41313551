#pragma once

// Test-only 1-D obstacle-problem oracle, independent of the closed forms it
// checks: projected SOR on a uniform ln(x) grid for
//   (sigma^2/2) V_ll + (r - delta - sigma^2/2) V_l - r V = 0
// with lower obstacle (x-K)^+ and Dirichlet ends.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle1d {

struct Problem {
    double r, delta, sigma, strike;
    double l_lo, l_hi;      // ln-x domain
    double v_lo, v_hi;      // Dirichlet values
    int n = 2001;
};

inline std::vector<double> solve_obstacle(const Problem& p) {
    const int n = p.n;
    const double h = (p.l_hi - p.l_lo) / (n - 1);
    const double a = 0.5 * p.sigma * p.sigma / (h * h);
    const double b = (p.r - p.delta - 0.5 * p.sigma * p.sigma) / (2.0 * h);
    const double cl = a - b, cu = a + b, dg = 2.0 * a + p.r;
    if (cl <= 0.0 || cu <= 0.0) throw std::runtime_error("oracle1d: grid too coarse");

    std::vector<double> x(n), g(n), v(n);
    for (int i = 0; i < n; ++i) {
        x[i] = std::exp(p.l_lo + i * h);
        g[i] = std::max(x[i] - p.strike, 0.0);
        v[i] = std::max(g[i], 0.0);
    }
    v[0] = p.v_lo;
    v[n - 1] = p.v_hi;

    const double omega = 1.6, tol = 1e-12;
    for (long sweep = 0; sweep < 200000; ++sweep) {
        double res = 0.0;
        for (int i = 1; i < n - 1; ++i) {
            const double gs = (cl * v[i - 1] + cu * v[i + 1]) / dg;
            v[i] = std::max(v[i] + omega * (gs - v[i]), g[i]);
        }
        for (int i = 1; i < n - 1; ++i) {
            double rr = dg * v[i] - cl * v[i - 1] - cu * v[i + 1];
            if (v[i] <= g[i] + 1e-14) rr = std::min(rr, 0.0);
            res = std::max(res, std::fabs(rr));
        }
        if (res < tol) return v;
    }
    throw std::runtime_error("oracle1d: PSOR did not converge");
}

inline double interp(const Problem& p, const std::vector<double>& v, double xq) {
    const double l = std::log(xq);
    const double h = (p.l_hi - p.l_lo) / (p.n - 1);
    const double f = (l - p.l_lo) / h;
    const int i = std::max(0, std::min(p.n - 2, static_cast<int>(f)));
    const double t = f - i;
    return (1.0 - t) * v[i] + t * v[i + 1];
}

// Buyer value when the seller cancels at K paying eps0: Dirichlet eps0 at K,
// x-K far out (deep in the stopping region).
inline double vk_value(double r, double delta, double sigma, double strike, double eps0,
                       double xq) {
    Problem p{r, delta, sigma, strike, std::log(strike), std::log(4e3 * strike), eps0,
              4e3 * strike - strike, 4001};
    const auto v = solve_obstacle(p);
    return interp(p, v, xq);
}

// Unconstrained perpetual call: zero value far left, x-K far right.
inline double perpetual_value(double r, double delta, double sigma, double strike,
                              double xq) {
    Problem p{r,      delta, sigma, strike, std::log(1e-3 * strike), std::log(4e3 * strike),
              0.0,    4e3 * strike - strike, 4001};
    const auto v = solve_obstacle(p);
    return interp(p, v, xq);
}

}  // namespace oracle1d
