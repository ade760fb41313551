#pragma once

#include <optional>
#include <utility>

#include "gamecall/model.hpp"

namespace gamecall {

// Complete-information benchmarks (y fixed at 0 or 1). These provide the
// lateral boundary data for the PDE solve and the acceptance oracles.

// Roots of (sigma^2/2) L^2 + (r - delta - sigma^2/2) L - r = 0,
// ordered lambda2 < 0 < 1 <= lambda1 (lambda1 = 1 exactly when delta = 0).
struct LambdaPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

LambdaPair lambda_roots(const ModelParams& m, double delta);

// Perpetual American call with dividend rate delta: threshold
// xstar = lambda1 K/(lambda1-1), value (xstar-K)(x/xstar)^{lambda1} below it.
struct PerpetualCall {
    double threshold = 0.0;
    double lambda1 = 0.0;
    double strike = 0.0;

    double value(double x) const;
    double slope(double x) const;
};

PerpetualCall perpetual_call(const ModelParams& m, double delta);
inline PerpetualCall perpetual_call(const ModelParams& m) { return perpetual_call(m, m.delta0); }

// Buyer's stopping problem when the seller cancels at the first hitting of K
// (paying eps0 there). On (K, b): A (x/K)^{l1} + B (x/K)^{l2} with value eps0
// at K and smooth fit at the free point b; value x-K beyond b.
struct VkSolution {
    double b = 0.0;  // free point
    double lambda1 = 0.0, lambda2 = 0.0;
    double strike = 0.0, penalty = 0.0;
    double a_at_b = 0.0;   // A * (b/K)^{lambda1}, overflow-safe anchor
    double b_coeff = 0.0;  // B

    double value(double x) const;
    double slope(double x) const;
    double slope_at_strike() const;
};

VkSolution solve_vk(const ModelParams& m, double delta);
inline double value_vk(const ModelParams& m, double x) { return solve_vk(m, m.delta0).value(x); }

// Critical dividend rates delta1 < delta2:
//   delta2: V_inf(K,1; delta) = eps0
//   delta1: lim_{x->K+} (V_K(x,1; delta) - eps0)/(x - K) = 1
// Returns nullopt when eps0 >= strike (Case 1 regardless of delta).
std::optional<std::pair<double, double>> critical_dividends(const ModelParams& m);

enum class CaseId { Case1, Case2, Case3, Case4 };

const char* case_name(CaseId c);

struct CompleteInfoSolution {
    CaseId case_id = CaseId::Case1;
    std::optional<double> delta1;
    std::optional<double> delta2;
    std::optional<double> alpha0;  // Case 3
    std::optional<double> alpha1;  // Case 4
    std::optional<double> beta1;   // Case 4
    double buyer_threshold = 0.0;  // lambda1 K/(lambda1-1) at delta0
};

// Case 1 iff eps0 >= K; Case 2 iff eps0 < K and delta0 >= delta2;
// Case 3 iff delta1 <= delta0 < delta2; Case 4 iff delta0 < delta1.
CompleteInfoSolution classify_case(const ModelParams& m);

// Root alpha0 > K of the Case-3 scalar equation; relative residual < 1e-10.
double solve_alpha0(const ModelParams& m);

// (alpha1, beta1) solving the Case-4 2x2 system, K < beta1 < alpha1;
// damped Newton on log variables after a coarse bracket scan.
std::pair<double, double> solve_alpha1_beta1(const ModelParams& m);

// Relative residual of the Case-3 equation at a candidate alpha.
double alpha0_residual(const ModelParams& m, double alpha);

// Relative residuals of the two Case-4 equations at a candidate pair.
std::pair<double, double> alpha1_beta1_residuals(const ModelParams& m, double alpha,
                                                 double beta);

enum class EdgeSide { y0_edge, y1_edge };

// Full complete-information value function on one edge of the y-domain,
// assembled per case as a piecewise combination of x^{lambda1}, x^{lambda2}
// and the stopping payoffs.
struct EdgeValueFn {
    EdgeSide side = EdgeSide::y1_edge;
    CaseId case_id = CaseId::Case1;
    double strike = 0.0, penalty = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;
    // y1 edge: S1 starts at x_upper; S2 (if any) ends at x_lower (Case 4)
    // or is {K} (Case 3) or empty (Cases 1-2).
    double x_upper = 0.0;           // x*, alpha0 or alpha1
    double x_lower = 0.0;           // beta1 (Case 4), else strike
    double cont_a_at_upper = 0.0;   // A (x_upper/K)^{l1}, anchored form
    double cont_b = 0.0;            // B coefficient on (x/K)^{lambda2}
    double below_strike_coeff = 0.0;  // eps0/K^{l1} pieces handled via (x/K)^{l1}

    double operator()(double x) const;
    // One-sided slopes, used by smooth-fit tests.
    double slope(double x) const;
};

EdgeValueFn edge_value(EdgeSide side, const ModelParams& m, const CompleteInfoSolution& ci);
EdgeValueFn edge_value(EdgeSide side, const ModelParams& m);

// Fundamental solutions of the Y-generator killed at rate r - k:
// psi(y) = y^beta (1-y)^{1-beta}, phi(y) = y^{1-beta}(1-y)^beta,
// beta = sigma^2/delta0 + 1.
struct YFundamentals {
    double beta = 0.0;
    double psi = 0.0;
    double phi = 0.0;
};

YFundamentals y_fundamental(const ModelParams& m, double y);

}  // namespace gamecall
