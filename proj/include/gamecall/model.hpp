#pragma once

#include <cmath>

#include "gamecall/errors.hpp"

namespace gamecall {

// Market constants of the game call option with an unobserved dividend
// switch, plus the derived regime quantities everything else keys on.
//
// Dynamics: dX = (r - delta0*Y) X dt + sigma X dW,
//           dY = -(delta0/sigma) Y(1-Y) dW.
// Payoffs:  G1(x) = (x-K)^+ for the buyer, G2 = G1 + eps0 for the seller.
struct ModelParams {
    double r = 0.0;        // discount rate, > 0
    double delta0 = 0.0;   // dividend rate when D = 1, > 0
    double sigma = 0.0;    // volatility, > 0
    double strike = 0.0;   // K, > 0
    double penalty = 0.0;  // eps0, cancellation penalty, > 0

    // Derived, populated by validate().
    double k = 0.0;      // r - sigma^2/2 - delta0/2; the drift of Z
    double ratio = 0.0;  // sigma^2 / delta0
    bool assumption_ratio_ok = false;      // ratio >= 1
    bool assumption_ratio_strict = false;  // ratio > 1
    bool strong_r = false;  // (d0/s^2)(d0+s^2)/2 < r < (d0+s^2)/2

    // Validates raw inputs and fills the derived fields. Rejects |k| below
    // 1e-12 (the z coordinate stops moving and the problem degenerates).
    static ModelParams validate(double r, double delta0, double sigma,
                                double strike, double penalty);

    double g1(double x) const { return x > strike ? x - strike : 0.0; }
    double g2(double x) const { return g1(x) + penalty; }
};

struct StatePoint {
    double x = 0.0;  // asset level, > 0
    double y = 0.0;  // posterior probability of D = 1, in [0,1]
};

struct TransformedPoint {
    double z = 0.0;  // ln x + (sigma^2/delta0) ln(y/(1-y))
    double y = 0.0;  // in (0,1); the transform is singular at the endpoints
};

// z = ln x + rho * ln(y/(1-y)) with rho = sigma^2/delta0.
TransformedPoint to_z(const StatePoint& p, const ModelParams& m);

// x = F(z,y) = e^z ((1-y)/y)^rho. Inverse of to_z at fixed y.
StatePoint from_z(const TransformedPoint& q, const ModelParams& m);

// F(z,y) as a scalar; throws SingularTransform for y outside (0,1).
double transform_f(double z, double y, const ModelParams& m);

// log F(z,y); safe against overflow for very large |z|.
double log_transform_f(double z, double y, const ModelParams& m);

// The curve y_K(z) on which F(z, y_K(z)) = K; logistic in z, increasing.
double y_k_curve(double z, const ModelParams& m);

// Obstacles in transformed coordinates: H_i(z,y) = G_i(F(z,y)).
double obstacle(int which, const TransformedPoint& q, const ModelParams& m);

}  // namespace gamecall
