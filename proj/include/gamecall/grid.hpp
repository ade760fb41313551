#pragma once

#include <cmath>

#include "gamecall/errors.hpp"
#include "gamecall/model.hpp"

namespace gamecall {

// Rectangular solver grid in (z, lambda) with lambda = ln(y/(1-y)).
// Nodes are uniform in z and in lambda; the y nodes y_j = logistic(lambda_j)
// concentrate near both endpoints where the Y-diffusion degenerates. In the
// lambda coordinate the diffusion is constant, so the per-cell growth of
// F = e^{z - ratio*lambda} stays uniform across rows.
struct GridSpec {
    double z_min = 0.0;
    double z_max = 0.0;
    int n_z = 0;
    double y_min = 1e-3;  // lateral truncation; domain is [y_min, 1-y_min]
    int n_y = 0;

    void check() const {
        if (!(z_min < z_max)) throw ConfigError("GridSpec: z_min must be < z_max");
        if (n_z < 16 || n_y < 16) throw ConfigError("GridSpec: need at least 16 nodes per axis");
        if (!(y_min > 0.0 && y_min < 0.5)) throw ConfigError("GridSpec: y_min must be in (0, 0.5)");
    }

    double dz() const { return (z_max - z_min) / (n_z - 1); }
    double lambda_max() const { return std::log((1.0 - y_min) / y_min); }
    double dlambda() const { return 2.0 * lambda_max() / (n_y - 1); }
    double z_at(int i) const { return z_min + i * dz(); }
    double lambda_at(int j) const { return -lambda_max() + j * dlambda(); }
    double y_at(int j) const {
        const double l = lambda_at(j);
        return l >= 0.0 ? 1.0 / (1.0 + std::exp(-l)) : std::exp(l) / (1.0 + std::exp(l));
    }

    // z range such that every y row covers x in [x_lo, x_hi] (prices).
    static GridSpec spanning(const ModelParams& m, int n_z = 400, int n_y = 200,
                             double y_min = 1e-3, double x_lo_over_k = 1e-2,
                             double x_hi_over_k = 1e3) {
        GridSpec g;
        g.n_z = n_z;
        g.n_y = n_y;
        g.y_min = y_min;
        const double lmax = std::log((1.0 - y_min) / y_min);
        g.z_min = std::log(x_lo_over_k * m.strike) - m.ratio * lmax;
        g.z_max = std::log(x_hi_over_k * m.strike) + m.ratio * lmax;
        g.check();
        return g;
    }
};

}  // namespace gamecall
