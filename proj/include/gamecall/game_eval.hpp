#pragma once

#include <string>
#include <vector>

#include "gamecall/paths.hpp"
#include "gamecall/solver.hpp"

namespace gamecall {

enum class StrategyKind { boundary_hit, immediate, never, shifted_boundary };

struct StrategySpec {
    StrategyKind kind = StrategyKind::boundary_hit;
    double shift = 0.0;  // additive y-shift of c1 (buyer) or c2 (seller)

    static StrategySpec boundary() { return {StrategyKind::boundary_hit, 0.0}; }
    static StrategySpec immediate() { return {StrategyKind::immediate, 0.0}; }
    static StrategySpec never() { return {StrategyKind::never, 0.0}; }
    static StrategySpec shifted(double s) { return {StrategyKind::shifted_boundary, s}; }
};

struct GameEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    double truncation_bias_bound = 0.0;
    double fraction_truncated = 0.0;
};

// Monte Carlo value of M_{x,y}(tau, gamma) for one strategy pair. Horizon
// truncation pays zero (the paper's convention on tau^gamma = infinity) and
// books the bias bound e^{-rT}(a_z + eps0) separately.
GameEstimate evaluate_pair(const ModelParams& m, const StatePoint& start,
                           const StrategySpec& tau, const StrategySpec& gamma,
                           const FreeBoundaries& fb, const SimConfig& cfg);

struct DeviationResult {
    bool buyer_side = true;
    double shift = 0.0;
    double estimate = 0.0;
    double diff_mean = 0.0;  // deviation minus base, common random numbers
    double diff_se = 0.0;
    double slack = 0.0;
    bool pass = false;
};

struct SaddleReport {
    double base = 0.0;
    double base_se = 0.0;
    double truncation_bias_bound = 0.0;
    double fraction_truncated = 0.0;
    double horizon = 0.0;
    bool in_theorem_scope = false;
    std::string scope_note;
    std::vector<DeviationResult> deviations;
    bool all_pass = true;
};

// Buyer deviations must not gain, seller deviations must not save, beyond
// 3 SE of the paired difference plus the truncation bound. All strategies
// share one set of path increments.
SaddleReport saddle_check(const ModelParams& m, const StatePoint& start,
                          const FreeBoundaries& fb, const std::vector<double>& shifts,
                          const SimConfig& cfg);

struct MartingaleCheckpoint {
    double t = 0.0;
    double sup_mean = 0.0, sup_se = 0.0;    // stopped at gamma*
    double sub_mean = 0.0, sub_se = 0.0;    // stopped at tau*
    double mart_mean = 0.0, mart_se = 0.0;  // stopped at tau* ^ gamma*
    long clamped_evals = 0;                 // off-surface value lookups clamped in y
};

struct MartingaleReport {
    double v_ref = 0.0;  // surface value at the start
    double interp_allowance = 0.0;
    std::vector<MartingaleCheckpoint> checkpoints;
    bool pass = true;
};

// Super/sub/martingale estimates of the discounted value process stopped at
// the candidate optimal times, compared against the surface value.
MartingaleReport martingale_check(const ModelParams& m, const StatePoint& start,
                                  const ValueSurface& surface, const FreeBoundaries& fb,
                                  const std::vector<double>& checkpoints,
                                  const SimConfig& cfg);

struct RegularityPoint {
    double z0 = 0.0, y0 = 0.0;
    bool on_c1 = true;
    double frac_exceed_small = 0.0;  // P(entry > 1e-3)
    double frac_exceed_large = 0.0;  // P(entry > 1e-2)
};

struct RegularityReport {
    std::vector<RegularityPoint> points;
    bool exceptional_point_flagged = false;
    double z_K = std::numeric_limits<double>::quiet_NaN();
    bool pass = true;  // P(entry > 1e-2) <= 5% everywhere sampled
};

// Empirical boundary regularity: paths started on c1 / c2 must enter the
// region's interior essentially immediately. The point (z_K, yK(z_K)) is
// excluded (and flagged) when k > 0.
RegularityReport regularity_probe(const ModelParams& m, const FreeBoundaries& fb,
                                  int n_points, const SimConfig& cfg);

}  // namespace gamecall
