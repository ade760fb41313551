#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "gamecall/closed_form.hpp"
#include "gamecall/grid.hpp"
#include "gamecall/model.hpp"

namespace gamecall {

enum class Region : std::uint8_t { C = 0, S1 = 1, S2 = 2 };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::C: return "C";
        case Region::S1: return "S1";
        case Region::S2: return "S2";
    }
    return "?";
}

// Solved double-obstacle surface. The native unknown is the detachment
// w = v - (F - K); v is reconstructed nodewise. On grid nodes w coincides
// with u(x,y) = V(x,y) - (x-K) evaluated at x = F(z,y).
struct ValueSurface {
    GridSpec grid;
    ModelParams params;
    CompleteInfoSolution complete_info;
    std::optional<double> cap;  // payoff truncation level n, if any

    Eigen::MatrixXd w;  // n_z x n_y detachment surface
    Eigen::MatrixXd v;  // n_z x n_y value surface
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> region;

    long total_sweeps = 0;
    double max_lcp_residual = 0.0;
    double tol_active = 0.0;  // region-label tolerance, 1e-7 * K

    int nz() const { return grid.n_z; }
    int ny() const { return grid.n_y; }

    double f_at(int i, int j) const {
        return transform_f(grid.z_at(i), grid.y_at(j), params);
    }
    // Lower obstacle in w coordinates: G1-cap applied when truncated.
    double w_lower(int i, int j) const {
        const double f = f_at(i, j);
        const double fc = cap ? std::min(f, *cap) : f;
        const double g1 = fc > params.strike ? fc - params.strike : 0.0;
        return g1 - (f - params.strike);
    }
    double w_upper(int i, int j) const { return w_lower(i, j) + params.penalty; }
    Region region_at(int i, int j) const { return static_cast<Region>(region(i, j)); }
};

// Sampled free-boundary curves. Entries are NaN where the corresponding
// region is absent at that node; z_K and b2_at_K are NaN when S2 is empty.
struct FreeBoundaries {
    Eigen::VectorXd z;    // grid z nodes
    Eigen::VectorXd c1;   // buyer boundary in y per z node
    Eigen::VectorXd c2;   // seller boundary in y per z node
    Eigen::VectorXd yk;   // y_K(z)
    Eigen::VectorXd y;    // grid y nodes
    Eigen::VectorXd b1;   // buyer boundary in x per y node
    Eigen::VectorXd b2;   // seller boundary in x per y node
    double z_K = std::numeric_limits<double>::quiet_NaN();
    double b2_at_K = std::numeric_limits<double>::quiet_NaN();
    bool s2_empty = true;
    // y -> 1 limit of b1, estimated by averaging the sampled boundary over
    // the top band of rows (phase-averages the sub-cell extraction noise).
    double y1_buyer_threshold = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace gamecall
