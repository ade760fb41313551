#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "gamecall/model.hpp"
#include "gamecall/rng.hpp"
#include "gamecall/surface.hpp"

namespace gamecall {

struct SimConfig {
    double dt = 1e-3;
    double horizon = 1.0;
    long n_paths = 1000;
    std::uint64_t seed = 1;

    void check() const {
        if (!(dt > 0.0)) throw ConfigError("SimConfig: dt must be positive");
        if (!(horizon >= dt)) throw ConfigError("SimConfig: horizon must cover one step");
        if (n_paths < 1) throw ConfigError("SimConfig: need at least one path");
    }
    long n_steps() const { return static_cast<long>(std::ceil(horizon / dt - 1e-9)); }
};

// Simulated batch of the filtered pair. Y is Euler with a clamp to [0,1]
// (absorbing, the diffusion coefficient vanishes there); Z is exact affine;
// X is reconstructed through the transform, so the Z-invariance holds
// nodewise by construction. Paths that touch an endpoint continue as
// geometric Brownian motion with the frozen drift.
struct PathBatch {
    Eigen::VectorXd times;     // n_steps + 1 grid points
    Eigen::VectorXd z_values;  // z0 + k t (NaN when started on a degenerate edge)
    Eigen::MatrixXd y;         // n_paths x (n_steps+1)
    Eigen::MatrixXd x;         // n_paths x (n_steps+1)
    Eigen::MatrixXd dw;        // n_paths x n_steps Brownian increments
    std::optional<Eigen::MatrixXd> u;  // flow derivatives dY/dy0
    std::uint64_t seed = 0;
    StatePoint start;
};

PathBatch simulate_filtered(const ModelParams& m, const StatePoint& start,
                            const SimConfig& cfg);

// Observed price under the true scenario D = d: exact lognormal updates.
Eigen::MatrixXd simulate_scenario(const ModelParams& m, double x0, int d,
                                  const SimConfig& cfg);

// Posterior recovered from the observed price path alone via the invariance
// of z: logit(Y_t) = logit(y0) + (delta0/sigma^2)(ln x0 + k t - ln S_t).
Eigen::MatrixXd exact_filter(const ModelParams& m, const Eigen::MatrixXd& s_paths,
                             double x0, double y0, double dt);

// Euler on dU = -(delta0/sigma)(1-2Y) U dW, driven by the batch's own
// increments; fills batch.u.
void flow_derivative(const ModelParams& m, PathBatch& batch);

enum class TargetRegion { S1, S2 };

// First grid time at which the path is inside the target region, boundaries
// linearly interpolated between z nodes; +infinity if never within the grid.
// The additive y-shift deforms c1 (S1) or c2 (S2).
double hitting_time(const ModelParams& m, const FreeBoundaries& fb,
                    const Eigen::VectorXd& times, const Eigen::VectorXd& y_path, double z0,
                    TargetRegion target, double y_shift = 0.0);

// Continuation-region bound on X for a game started at z0 (proof-of-Nash
// bound b1(c1(z))); for k<0 the boundary is extrapolated geometrically below
// the sampled range at the rate delta0/(sigma^2-delta0).
double continuation_x_bound(const ModelParams& m, const FreeBoundaries& fb, double z0,
                            double t);

// Smallest horizon with e^{-rT}(bound(T) + eps0) below `bias_target`.
double default_horizon(const ModelParams& m, const FreeBoundaries& fb, double z0,
                       double bias_target);

// Boundary curves sampled along the deterministic time grid z(t) = z0 + k t;
// NaN where the curve is absent. Shared by all paths of an evaluation.
struct BoundaryOnPath {
    Eigen::VectorXd c1;
    Eigen::VectorXd c2;
    Eigen::VectorXd yk;
};

BoundaryOnPath boundaries_along(const ModelParams& m, const FreeBoundaries& fb, double z0,
                                const Eigen::VectorXd& times);

// Linear interpolation of a sampled curve with NaN gaps; NaN outside.
double interp_curve(const Eigen::VectorXd& grid, const Eigen::VectorXd& values, double at);

}  // namespace gamecall
