#pragma once

#include <vector>

#include "gamecall/surface.hpp"

namespace gamecall {

struct SolveOptions {
    double omega = 1.5;             // PSOR relaxation parameter
    double psor_tol = 1e-9;         // residual tolerance, scaled by strike
    long sweep_budget = 100000;     // per-slice sweep cap
    double tol_active = 1e-7;       // region-label tolerance, scaled by strike
};

// Marches the double-obstacle problem in z (direction keyed to sign(k)) with
// an implicit step in the y(lambda) direction per slice, projected SOR onto
// the obstacle sandwich. Lateral Dirichlet data comes from the
// complete-information edge values.
ValueSurface solve(const ModelParams& m, const GridSpec& g, const SolveOptions& opt = {});

// Same scheme with payoffs capped at level n > K: G_i^(n)(x) = G_i(min(x,n)).
ValueSurface solve_truncated(const ModelParams& m, const GridSpec& g, double n,
                             const SolveOptions& opt = {});

// Free-boundary curves from the labeled surface. Throws EmptyRegion when S1
// is nowhere active; an empty S2 is recorded (legitimate when eps0 >= K).
FreeBoundaries extract_boundaries(const ValueSurface& s);

// V(x,y) by bilinear interpolation in (z, lambda); NaN where (x,y) falls
// outside the solved rectangle.
double value_at(const ValueSurface& s, double x, double y);
// Same, but with y clamped into the solved band (interpolation fallback for
// Monte Carlo paths that graze the lateral truncation).
double value_at_yclamped(const ValueSurface& s, double x, double y);
Eigen::MatrixXd surface_to_xy(const ValueSurface& s, const std::vector<double>& xs,
                              const std::vector<double>& ys);

struct SmoothFitSlice {
    double z = 0.0;
    double jump_c1 = std::numeric_limits<double>::quiet_NaN();
    double jump_c2 = std::numeric_limits<double>::quiet_NaN();
    bool excluded = false;  // inside the flagged neighborhood of (z_K, yK(z_K))
};

struct SmoothFitReport {
    std::vector<SmoothFitSlice> slices;
    double median_jump_c1 = std::numeric_limits<double>::quiet_NaN();
    double median_jump_c2 = std::numeric_limits<double>::quiet_NaN();
    double max_wy_inside_s2 = 0.0;  // should vanish: w is constant in S2 on {F>=K}
    bool exceptional_point_flagged = false;
    double z_K = std::numeric_limits<double>::quiet_NaN();
};

// One-sided w_y estimates one cell inside the continuation region at the c1
// and c2 crossings; medians over the interquartile z-range of each boundary.
SmoothFitReport smoothfit_report(const ValueSurface& s, const FreeBoundaries& fb);

struct PdeResidualReport {
    double max_c_residual = 0.0;      // discrete operator on continuation nodes
    double scaling_bound = 0.0;       // 1e-6 K (1/dz + 1/dlambda^2)
    double min_source_on_s1 = 0.0;    // s = d0 y F - rK; >= 0 on S1 interior (A1)
    double max_excess_on_s2 = 0.0;    // s + r eps0 <= 0 on S2 interior (A2)
    long c_nodes = 0, s1_nodes = 0, s2_nodes = 0;
};

PdeResidualReport pde_residual(const ValueSurface& s);

struct InvariantReport {
    double sandwich_violation = 0.0;     // max obstacle violation (exact projection)
    double min_z_increment = 0.0;        // v nondecreasing along z rows
    double min_w_y_increment = 0.0;      // w nondecreasing in y (needs ratio >= 1)
    bool w_monotonicity_checked = false; // false when sigma^2/delta0 < 1
    int boundary_layer_rows = 0;         // rows excluded next to the Dirichlet data
    bool labels_exclusive = true;
};

// Nodewise invariants; monotonicity checks skip `layer_rows` rows adjacent to
// each lateral Dirichlet boundary (the documented O(y_min) data layer).
InvariantReport check_invariants(const ValueSurface& s, int layer_rows = 2);

}  // namespace gamecall
