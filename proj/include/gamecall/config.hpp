#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gamecall/grid.hpp"
#include "gamecall/model.hpp"
#include "gamecall/paths.hpp"

namespace gamecall {

// Flat key-value run configuration with sections; strict parsing (unknown
// keys or sections are rejected with a line diagnostic).
//
//   [model]  r, delta0, sigma, strike, penalty
//   [grid]   nz, ny, ymin, xlo, xhi  (xlo/xhi in strike units; optional
//            zmin/zmax override the span policy)
//   [sim]    dt, horizon (0 = derive from the truncation bias target),
//            npaths, seed
//   [output] dir
//   [checks] names = comma list; slack_multiplier (optional)
struct RunConfig {
    ModelParams model;
    int grid_nz = 400;
    int grid_ny = 200;
    double grid_ymin = 1e-3;
    double grid_xlo = 1e-2;
    double grid_xhi = 1e3;
    std::optional<double> grid_zmin;
    std::optional<double> grid_zmax;

    SimConfig sim;
    bool horizon_auto = true;

    std::string output_dir = "out";
    std::vector<std::string> check_names;
    double slack_multiplier = 3.0;

    std::string source_path;
    std::uint64_t config_hash = 0;

    GridSpec make_grid() const {
        if (grid_zmin && grid_zmax) {
            GridSpec g;
            g.z_min = *grid_zmin;
            g.z_max = *grid_zmax;
            g.n_z = grid_nz;
            g.n_y = grid_ny;
            g.y_min = grid_ymin;
            g.check();
            return g;
        }
        return GridSpec::spanning(model, grid_nz, grid_ny, grid_ymin, grid_xlo, grid_xhi);
    }
};

RunConfig parse_config_text(const std::string& text, const std::string& source_name);
RunConfig load_config(const std::string& path);

// FNV-1a over the raw config bytes; recorded in every artifact manifest.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace gamecall
