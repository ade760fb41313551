#pragma once

#include <string>
#include <vector>

#include "gamecall/config.hpp"
#include "gamecall/game_eval.hpp"
#include "gamecall/solver.hpp"

namespace gamecall {

// CSV/JSON artifact writers. All floating-point output is %.17g so rerunning
// the same configuration reproduces the files byte for byte.

void write_surface_csv(const std::string& path, const ValueSurface& s);
void write_boundaries_zy_csv(const std::string& path, const FreeBoundaries& fb);
void write_boundaries_xy_csv(const std::string& path, const FreeBoundaries& fb);
void write_paths_csv(const std::string& path, const PathBatch& b);

// One verification result; verdict in {pass, fail, out-of-theorem-scope, skipped}.
struct CheckResult {
    std::string name;
    std::string verdict;
    double estimate = 0.0;
    double slack = 0.0;
    std::string detail;
};

void write_checks_json(const std::string& path, const std::vector<CheckResult>& results);
void write_benchmark_json(const std::string& path, const ModelParams& m,
                          const CompleteInfoSolution& ci);
void write_benchmark_curves_csv(const std::string& path, const ModelParams& m,
                                const CompleteInfoSolution& ci, int n_points = 200);
void write_batch_meta_json(const std::string& path, const PathBatch& b, const SimConfig& cfg);
void write_manifest_json(const std::string& path, const RunConfig& rc, const ValueSurface* s);

// Re-validates the artifact set written by a completed run: files present,
// boundary monotonicity on export, manifest hash matching the input config.
// Returns the validated file names.
std::vector<std::string> export_bundle(const std::string& dir, const RunConfig& rc);

}  // namespace gamecall
