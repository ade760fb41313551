#include "gamecall/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace gamecall {

namespace {

// pow via exp/log with exponent capping; x > 0.
double safe_pow(double x, double p) {
    double e = p * std::log(x);
    if (e > 700.0) e = 700.0;
    if (e < -700.0) return 0.0;
    return std::exp(e);
}

// Bracketed root finder: damped secant steps accepted when the residual
// shrinks and stays inside the bracket, bisection otherwise.
double newton_bisect(const std::function<double(double)>& f, double lo, double hi,
                     double flo, double fhi, double xtol, int max_iter = 200) {
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    for (int it = 0; it < max_iter; ++it) {
        if (fx == 0.0 || hi - lo < xtol) return x;
        // keep the bracket
        if ((flo < 0.0) == (fx < 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        double trial = x - fx * (hi - lo) / (fhi - flo);
        if (!(trial > lo && trial < hi)) trial = 0.5 * (lo + hi);
        double ftrial = f(trial);
        if (std::fabs(ftrial) > 0.5 * std::fabs(fx)) {
            double mid = 0.5 * (lo + hi);
            double fmid = f(mid);
            if (std::fabs(fmid) < std::fabs(ftrial)) {
                trial = mid;
                ftrial = fmid;
            }
        }
        x = trial;
        fx = ftrial;
    }
    return x;
}

// Scans n log-spaced points for a sign change; returns false if none.
bool log_bracket(const std::function<double(double)>& f, double lo, double hi, int n,
                 double* out_lo, double* out_hi, double* out_flo, double* out_fhi) {
    double prev_x = lo, prev_f = f(lo);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 1; i < n; ++i) {
        const double x = lo * std::exp(step * i);
        const double fx = f(x);
        if (std::isfinite(fx) && std::isfinite(prev_f) && (prev_f <= 0.0) != (fx <= 0.0)) {
            *out_lo = prev_x;
            *out_hi = x;
            *out_flo = prev_f;
            *out_fhi = fx;
            return true;
        }
        prev_x = x;
        prev_f = fx;
    }
    return false;
}

}  // namespace

LambdaPair lambda_roots(const ModelParams& m, double delta) {
    const double s2 = m.sigma * m.sigma;
    const double b = m.r - delta - 0.5 * s2;
    const double disc = b * b + 2.0 * s2 * m.r;  // always positive for r > 0
    const double sq = std::sqrt(disc);
    LambdaPair lp;
    lp.lambda1 = (-b + sq) / s2;
    lp.lambda2 = (-b - sq) / s2;
    return lp;
}

double PerpetualCall::value(double x) const {
    if (x >= threshold) return x - strike;
    if (x <= 0.0) return 0.0;
    return (threshold - strike) * safe_pow(x / threshold, lambda1);
}

double PerpetualCall::slope(double x) const {
    if (x >= threshold) return 1.0;
    return (threshold - strike) * lambda1 / threshold * safe_pow(x / threshold, lambda1 - 1.0);
}

PerpetualCall perpetual_call(const ModelParams& m, double delta) {
    const LambdaPair lp = lambda_roots(m, delta);
    PerpetualCall pc;
    pc.lambda1 = lp.lambda1;
    pc.strike = m.strike;
    pc.threshold = lp.lambda1 * m.strike / (lp.lambda1 - 1.0);
    return pc;
}

double VkSolution::value(double x) const {
    if (x >= b) return x - strike;
    // A (x/K)^{l1} + B (x/K)^{l2}, with A anchored at b to avoid overflow.
    const double term1 = a_at_b * safe_pow(x / b, lambda1);
    const double term2 = b_coeff * safe_pow(x / strike, lambda2);
    return term1 + term2;
}

double VkSolution::slope(double x) const {
    if (x >= b) return 1.0;
    const double term1 = lambda1 * a_at_b * safe_pow(x / b, lambda1) / x;
    const double term2 = lambda2 * b_coeff * safe_pow(x / strike, lambda2) / x;
    return term1 + term2;
}

double VkSolution::slope_at_strike() const { return slope(strike * (1.0 + 1e-14)); }

VkSolution solve_vk(const ModelParams& m, double delta) {
    const LambdaPair lp = lambda_roots(m, delta);
    const double l1 = lp.lambda1, l2 = lp.lambda2;
    const double K = m.strike, eps0 = m.penalty;

    // For candidate b: A + B = eps0 at K (scaled basis (x/K)^l), value b-K at b.
    // Smooth-fit residual is slope(b) - 1.
    auto coeffs = [&](double b, double* a_at_b, double* bc) {
        const double u = b / K;
        const double ul2 = safe_pow(u, l2);
        const double s = safe_pow(u, l2 - l1);  // u^{l2}/u^{l1} in (0,1)
        const double apsib = ((b - K) - eps0 * ul2) / (1.0 - s);
        *a_at_b = apsib;
        *bc = eps0 - apsib * safe_pow(u, -l1);
    };
    auto zeta = [&](double b) {
        double apsib, bc;
        coeffs(b, &apsib, &bc);
        return (l1 * apsib + l2 * bc * safe_pow(b / K, l2)) / b - 1.0;
    };

    double lo, hi, flo, fhi;
    if (!log_bracket(zeta, K * (1.0 + 1e-9), 1e6 * K, 400, &lo, &hi, &flo, &fhi)) {
        throw NoRoot("solve_vk: no smooth-fit bracket for b in (K, 1e6 K]; delta=" +
                     std::to_string(delta));
    }
    const double b = newton_bisect(zeta, lo, hi, flo, fhi, 1e-13 * K);

    VkSolution vk;
    vk.b = b;
    vk.lambda1 = l1;
    vk.lambda2 = l2;
    vk.strike = K;
    vk.penalty = eps0;
    coeffs(b, &vk.a_at_b, &vk.b_coeff);
    return vk;
}

std::optional<std::pair<double, double>> critical_dividends(const ModelParams& m) {
    if (m.penalty >= m.strike) return std::nullopt;
    const double K = m.strike, eps0 = m.penalty;
    const double dlo = 1e-6, dhi = 10.0 * m.r;

    auto f2 = [&](double d) { return perpetual_call(m, d).value(K) - eps0; };
    double lo, hi, flo, fhi;
    if (!log_bracket(f2, dlo, dhi, 600, &lo, &hi, &flo, &fhi)) {
        throw NoBracket("critical_dividends: V_inf(K) - eps0 has no sign change on (1e-6, 10r)");
    }
    const double delta2 = newton_bisect(f2, lo, hi, flo, fhi, 1e-10);

    auto f1 = [&](double d) { return solve_vk(m, d).slope_at_strike() - 1.0; };
    if (!log_bracket(f1, dlo, dhi, 600, &lo, &hi, &flo, &fhi)) {
        throw NoBracket("critical_dividends: V_K slope condition has no sign change on (1e-6, 10r)");
    }
    const double delta1 = newton_bisect(f1, lo, hi, flo, fhi, 1e-10);
    return std::make_pair(delta1, delta2);
}

const char* case_name(CaseId c) {
    switch (c) {
        case CaseId::Case1: return "Case1";
        case CaseId::Case2: return "Case2";
        case CaseId::Case3: return "Case3";
        case CaseId::Case4: return "Case4";
    }
    return "?";
}

namespace {

// Normalized Case-3 equation; all terms bounded for alpha > K.
double alpha0_terms(const ModelParams& m, const LambdaPair& lp, double alpha, double* t1,
                    double* t2, double* t3) {
    const double K = m.strike, eps0 = m.penalty;
    const double l1 = lp.lambda1, l2 = lp.lambda2;
    const double mm = (alpha - K) / alpha;
    const double t = K / alpha;
    *t1 = mm * l1 - 1.0;
    *t2 = -(mm * l2 - 1.0) * safe_pow(t, l1 - l2);
    *t3 = -(eps0 / K) * (l1 - l2) * safe_pow(t, 1.0 - l2);
    return *t1 + *t2 + *t3;
}

// Normalized Case-4 system in (alpha, t = beta/alpha).
void case4_system(const ModelParams& m, const LambdaPair& lp, double alpha, double beta,
                  double* e1, double* e2, double* scale1, double* scale2) {
    const double K = m.strike, eps0 = m.penalty;
    const double l1 = lp.lambda1, l2 = lp.lambda2;
    const double ma = (alpha - K) / alpha;
    const double mb = (beta - K + eps0) / beta;
    const double t = beta / alpha;
    const double a1 = ma * l1 - 1.0;
    const double a2 = -(ma * l2 - 1.0) * safe_pow(t, l1 - l2);
    const double a3 = -mb * (l1 - l2) * safe_pow(t, 1.0 - l2);
    *e1 = a1 + a2 + a3;
    *scale1 = std::fabs(a1) + std::fabs(a2) + std::fabs(a3);
    const double b1 = (mb * l1 - 1.0) * safe_pow(t, l1 - l2);
    const double b2 = -(mb * l2 - 1.0);
    const double b3 = -ma * (l1 - l2) * safe_pow(t, l1 - 1.0);
    *e2 = b1 + b2 + b3;
    *scale2 = std::fabs(b1) + std::fabs(b2) + std::fabs(b3);
}

}  // namespace

double alpha0_residual(const ModelParams& m, double alpha) {
    const LambdaPair lp = lambda_roots(m, m.delta0);
    double t1, t2, t3;
    const double f = alpha0_terms(m, lp, alpha, &t1, &t2, &t3);
    return std::fabs(f) / (std::fabs(t1) + std::fabs(t2) + std::fabs(t3));
}

double solve_alpha0(const ModelParams& m) {
    const LambdaPair lp = lambda_roots(m, m.delta0);
    auto f = [&](double a) {
        double t1, t2, t3;
        return alpha0_terms(m, lp, a, &t1, &t2, &t3);
    };
    const double K = m.strike;
    double lo, hi, flo, fhi;
    if (!log_bracket(f, K * (1.0 + 1e-9), 1e6 * K, 600, &lo, &hi, &flo, &fhi)) {
        throw NoBracket("solve_alpha0: no bracket in (K, 1e6 K) - inconsistent classification");
    }
    return newton_bisect(f, lo, hi, flo, fhi, 1e-13 * K);
}

std::pair<double, double> alpha1_beta1_residuals(const ModelParams& m, double alpha,
                                                 double beta) {
    const LambdaPair lp = lambda_roots(m, m.delta0);
    double e1, e2, s1, s2;
    case4_system(m, lp, alpha, beta, &e1, &e2, &s1, &s2);
    return {std::fabs(e1) / s1, std::fabs(e2) / s2};
}

std::pair<double, double> solve_alpha1_beta1(const ModelParams& m) {
    const LambdaPair lp = lambda_roots(m, m.delta0);
    const double K = m.strike;

    auto eval = [&](double la, double lb, double* e1, double* e2) {
        double s1, s2;
        case4_system(m, lp, std::exp(la), std::exp(lb), e1, e2, &s1, &s2);
    };

    // Coarse scan over K < beta < alpha for a starting point.
    double best_la = std::log(2.0 * K), best_lb = std::log(1.2 * K);
    double best = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia < 60; ++ia) {
        const double alpha = K * std::exp(std::log(50.0) * (ia + 1) / 60.0);
        for (int ib = 0; ib < 60; ++ib) {
            const double beta = K + (alpha - K) * (ib + 0.5) / 60.0;
            double e1, e2;
            eval(std::log(alpha), std::log(beta), &e1, &e2);
            const double v = std::fabs(e1) + std::fabs(e2);
            if (v < best) {
                best = v;
                best_la = std::log(alpha);
                best_lb = std::log(beta);
            }
        }
    }

    double la = best_la, lb = best_lb;
    double e1, e2;
    eval(la, lb, &e1, &e2);
    double res = std::fabs(e1) + std::fabs(e2);
    const double h = 1e-7;
    for (int it = 0; it < 200; ++it) {
        if (res < 1e-13) break;
        double e1a, e2a, e1b, e2b;
        eval(la + h, lb, &e1a, &e2a);
        eval(la, lb + h, &e1b, &e2b);
        const double j11 = (e1a - e1) / h, j12 = (e1b - e1) / h;
        const double j21 = (e2a - e2) / h, j22 = (e2b - e2) / h;
        const double det = j11 * j22 - j12 * j21;
        if (std::fabs(det) < 1e-300) break;
        double da = -(e1 * j22 - e2 * j12) / det;
        double db = -(j11 * e2 - j21 * e1) / det;
        double step = 1.0;
        bool accepted = false;
        for (int halve = 0; halve < 30; ++halve) {
            const double la2 = la + step * da, lb2 = lb + step * db;
            if (std::exp(lb2) > K && lb2 < la2) {
                double f1, f2;
                eval(la2, lb2, &f1, &f2);
                const double r2 = std::fabs(f1) + std::fabs(f2);
                if (r2 < res) {
                    la = la2;
                    lb = lb2;
                    e1 = f1;
                    e2 = f2;
                    res = r2;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    const double alpha = std::exp(la), beta = std::exp(lb);
    const auto rr = alpha1_beta1_residuals(m, alpha, beta);
    if (rr.first > 1e-8 || rr.second > 1e-8) {
        throw NoConvergence("solve_alpha1_beta1: best residuals " + std::to_string(rr.first) +
                            ", " + std::to_string(rr.second) + " after 200 iterations");
    }
    return {alpha, beta};
}

CompleteInfoSolution classify_case(const ModelParams& m) {
    CompleteInfoSolution ci;
    const LambdaPair lp = lambda_roots(m, m.delta0);
    ci.buyer_threshold = lp.lambda1 * m.strike / (lp.lambda1 - 1.0);
    if (m.penalty >= m.strike) {
        ci.case_id = CaseId::Case1;
        return ci;
    }
    const auto crit = critical_dividends(m);
    ci.delta1 = crit->first;
    ci.delta2 = crit->second;
    if (m.delta0 >= *ci.delta2) {
        ci.case_id = CaseId::Case2;
    } else if (m.delta0 >= *ci.delta1) {
        ci.case_id = CaseId::Case3;
        ci.alpha0 = solve_alpha0(m);
    } else {
        ci.case_id = CaseId::Case4;
        const auto ab = solve_alpha1_beta1(m);
        ci.alpha1 = ab.first;
        ci.beta1 = ab.second;
    }
    return ci;
}

double EdgeValueFn::operator()(double x) const {
    if (x <= 0.0) return side == EdgeSide::y0_edge && case_id == CaseId::Case1 ? 0.0 : 0.0;
    if (side == EdgeSide::y0_edge) {
        if (case_id == CaseId::Case1) return x;  // sup_tau E e^{-r tau}(X-K)^+ = x at delta=0
        if (x >= strike) return x - strike + penalty;
        return penalty * x / strike;  // eps0 * E[e^{-r gamma_K}] with psi(x) = x
    }
    // y1 edge
    if (case_id == CaseId::Case1 || case_id == CaseId::Case2) {
        PerpetualCall pc;
        pc.threshold = x_upper;
        pc.lambda1 = lambda1;
        pc.strike = strike;
        return pc.value(x);
    }
    if (x >= x_upper) return x - strike;
    if (case_id == CaseId::Case4 && x >= strike && x <= x_lower) return x - strike + penalty;
    const double cont_from = (case_id == CaseId::Case4) ? x_lower : strike;
    if (x > cont_from) {
        return cont_a_at_upper * safe_pow(x / x_upper, lambda1) +
               cont_b * safe_pow(x / strike, lambda2);
    }
    // below the strike: vanishing at 0, value eps0 at K
    return penalty * safe_pow(x / strike, lambda1);
}

double EdgeValueFn::slope(double x) const {
    if (x <= 0.0) return 0.0;
    if (side == EdgeSide::y0_edge) {
        if (case_id == CaseId::Case1) return 1.0;
        return x >= strike ? 1.0 : penalty / strike;
    }
    if (case_id == CaseId::Case1 || case_id == CaseId::Case2) {
        PerpetualCall pc;
        pc.threshold = x_upper;
        pc.lambda1 = lambda1;
        pc.strike = strike;
        return pc.slope(x);
    }
    if (x >= x_upper) return 1.0;
    if (case_id == CaseId::Case4 && x >= strike && x <= x_lower) return 1.0;
    const double cont_from = (case_id == CaseId::Case4) ? x_lower : strike;
    if (x > cont_from) {
        return lambda1 * cont_a_at_upper * safe_pow(x / x_upper, lambda1) / x +
               lambda2 * cont_b * safe_pow(x / strike, lambda2) / x;
    }
    return lambda1 * penalty * safe_pow(x / strike, lambda1) / x;
}

EdgeValueFn edge_value(EdgeSide side, const ModelParams& m, const CompleteInfoSolution& ci) {
    const LambdaPair lp = lambda_roots(m, m.delta0);
    EdgeValueFn fn;
    fn.side = side;
    fn.case_id = ci.case_id;
    fn.strike = m.strike;
    fn.penalty = m.penalty;
    fn.lambda1 = lp.lambda1;
    fn.lambda2 = lp.lambda2;
    fn.x_lower = m.strike;
    if (side == EdgeSide::y0_edge) return fn;

    switch (ci.case_id) {
        case CaseId::Case1:
        case CaseId::Case2:
            fn.x_upper = ci.buyer_threshold;
            break;
        case CaseId::Case3: {
            fn.x_upper = *ci.alpha0;
            // A + B = eps0 at K, value alpha0 - K at alpha0 (scaled basis (x/K)^l).
            const double u = fn.x_upper / m.strike;
            const double ul2 = safe_pow(u, lp.lambda2);
            const double s = safe_pow(u, lp.lambda2 - lp.lambda1);
            fn.cont_a_at_upper = ((fn.x_upper - m.strike) - m.penalty * ul2) / (1.0 - s);
            fn.cont_b = m.penalty - fn.cont_a_at_upper * safe_pow(u, -lp.lambda1);
            break;
        }
        case CaseId::Case4: {
            fn.x_upper = *ci.alpha1;
            fn.x_lower = *ci.beta1;
            // Values beta1-K+eps0 at beta1 and alpha1-K at alpha1.
            const double ua = *ci.alpha1 / m.strike, ub = *ci.beta1 / m.strike;
            const double va = *ci.alpha1 - m.strike;
            const double vb = *ci.beta1 - m.strike + m.penalty;
            // Solve A ua^{l1} + B ua^{l2} = va; A ub^{l1} + B ub^{l2} = vb,
            // anchored at ua to keep magnitudes tame.
            const double t = ub / ua;  // in (0,1)
            const double tl1 = safe_pow(t, lp.lambda1), tl2 = safe_pow(t, lp.lambda2);
            const double ua_l2 = safe_pow(ua, lp.lambda2);
            // A ua^{l1} =: Aa. Then Aa*tl1 + B ub^{l2} = vb, Aa + B ua^{l2} = va.
            // => B (ub^{l2} - tl1 ua^{l2}) = vb - tl1 va.
            const double ub_l2 = safe_pow(ub, lp.lambda2);
            const double B = (vb - tl1 * va) / (ub_l2 - tl1 * ua_l2);
            fn.cont_b = B;
            fn.cont_a_at_upper = va - B * ua_l2;
            break;
        }
    }
    return fn;
}

EdgeValueFn edge_value(EdgeSide side, const ModelParams& m) {
    return edge_value(side, m, classify_case(m));
}

YFundamentals y_fundamental(const ModelParams& m, double y) {
    if (!(y > 0.0 && y < 1.0)) {
        throw SingularTransform("y_fundamental: y must be in (0,1)");
    }
    YFundamentals f;
    f.beta = m.ratio + 1.0;
    f.psi = safe_pow(y, f.beta) * safe_pow(1.0 - y, 1.0 - f.beta);
    f.phi = safe_pow(y, 1.0 - f.beta) * safe_pow(1.0 - y, f.beta);
    return f;
}

}  // namespace gamecall
