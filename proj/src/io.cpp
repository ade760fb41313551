#include "gamecall/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace gamecall {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

}  // namespace

void write_surface_csv(const std::string& path, const ValueSurface& s) {
    auto out = open_out(path);
    out << "z,y,v,region\n";
    for (int i = 0; i < s.nz(); ++i) {
        for (int j = 0; j < s.ny(); ++j) {
            out << fmt(s.grid.z_at(i)) << ',' << fmt(s.grid.y_at(j)) << ','
                << fmt(s.v(i, j)) << ',' << region_name(s.region_at(i, j)) << '\n';
        }
    }
}

void write_boundaries_zy_csv(const std::string& path, const FreeBoundaries& fb) {
    auto out = open_out(path);
    out << "z,c1,c2,yK\n";
    for (int i = 0; i < fb.z.size(); ++i) {
        out << fmt(fb.z[i]) << ',' << fmt(fb.c1[i]) << ',' << fmt(fb.c2[i]) << ','
            << fmt(fb.yk[i]) << '\n';
    }
}

void write_boundaries_xy_csv(const std::string& path, const FreeBoundaries& fb) {
    auto out = open_out(path);
    out << "y,b1,b2\n";
    for (int j = 0; j < fb.y.size(); ++j) {
        out << fmt(fb.y[j]) << ',' << fmt(fb.b1[j]) << ',' << fmt(fb.b2[j]) << '\n';
    }
}

void write_paths_csv(const std::string& path, const PathBatch& b) {
    auto out = open_out(path);
    out << "t,path_id,y,z,x\n";
    for (long p = 0; p < b.y.rows(); ++p) {
        for (long n = 0; n < b.y.cols(); ++n) {
            out << fmt(b.times[n]) << ',' << p << ',' << fmt(b.y(p, n)) << ','
                << fmt(b.z_values[n]) << ',' << fmt(b.x(p, n)) << '\n';
        }
    }
}

void write_checks_json(const std::string& path, const std::vector<CheckResult>& results) {
    nlohmann::ordered_json j;
    j["checks"] = nlohmann::ordered_json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        nlohmann::ordered_json e;
        e["name"] = r.name;
        e["verdict"] = r.verdict;
        e["estimate"] = r.estimate;
        e["slack"] = r.slack;
        e["detail"] = r.detail;
        j["checks"].push_back(e);
        if (r.verdict == "fail") all_pass = false;
    }
    j["all_pass"] = all_pass;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_benchmark_json(const std::string& path, const ModelParams& m,
                          const CompleteInfoSolution& ci) {
    nlohmann::ordered_json j;
    j["case_id"] = case_name(ci.case_id);
    j["buyer_threshold_y1"] = ci.buyer_threshold;
    if (ci.delta1) j["delta1"] = *ci.delta1;
    if (ci.delta2) j["delta2"] = *ci.delta2;
    if (ci.alpha0) j["alpha0"] = *ci.alpha0;
    if (ci.alpha1) j["alpha1"] = *ci.alpha1;
    if (ci.beta1) j["beta1"] = *ci.beta1;
    const LambdaPair lp = lambda_roots(m, m.delta0);
    j["lambda1"] = lp.lambda1;
    j["lambda2"] = lp.lambda2;
    j["perpetual_threshold"] = perpetual_call(m).threshold;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_benchmark_curves_csv(const std::string& path, const ModelParams& m,
                                const CompleteInfoSolution& ci, int n_points) {
    const EdgeValueFn v0 = edge_value(EdgeSide::y0_edge, m, ci);
    const EdgeValueFn v1 = edge_value(EdgeSide::y1_edge, m, ci);
    auto out = open_out(path);
    out << "x,v0,v1\n";
    const double lo = std::log(1e-2 * m.strike), hi = std::log(1e2 * m.strike);
    for (int i = 0; i < n_points; ++i) {
        const double x = std::exp(lo + (hi - lo) * i / (n_points - 1));
        out << fmt(x) << ',' << fmt(v0(x)) << ',' << fmt(v1(x)) << '\n';
    }
}

void write_batch_meta_json(const std::string& path, const PathBatch& b,
                           const SimConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = b.seed;
    j["dt"] = cfg.dt;
    j["horizon"] = cfg.horizon;
    j["n_paths"] = static_cast<long long>(b.y.rows());
    j["n_steps"] = static_cast<long long>(b.dw.cols());
    j["start_x"] = b.start.x;
    j["start_y"] = b.start.y;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_manifest_json(const std::string& path, const RunConfig& rc,
                         const ValueSurface* s) {
    nlohmann::ordered_json j;
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, rc.config_hash);
    j["config_hash_fnv1a64"] = hash;
    j["config_path"] = rc.source_path;
    j["seed"] = rc.sim.seed;
    j["version"] = "gamecall 0.1.0";
    j["model"] = {{"r", rc.model.r},       {"delta0", rc.model.delta0},
                  {"sigma", rc.model.sigma}, {"strike", rc.model.strike},
                  {"penalty", rc.model.penalty}, {"k", rc.model.k},
                  {"ratio", rc.model.ratio}, {"strong_r", rc.model.strong_r}};
    if (s) {
        j["grid"] = {{"nz", s->grid.n_z},
                     {"ny", s->grid.n_y},
                     {"ymin", s->grid.y_min},
                     {"zmin", s->grid.z_min},
                     {"zmax", s->grid.z_max}};
        j["solver"] = {{"total_sweeps", s->total_sweeps},
                       {"max_lcp_residual", s->max_lcp_residual},
                       {"tol_active", s->tol_active},
                       {"case_id", case_name(s->complete_info.case_id)}};
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::vector<std::string> export_bundle(const std::string& dir, const RunConfig& rc) {
    namespace fs = std::filesystem;
    const std::vector<std::string> required = {
        "surface.csv",        "boundaries_zy.csv", "boundaries_xy.csv",
        "benchmark.json",     "benchmark_curves.csv", "manifest.json"};
    std::vector<std::string> found;
    for (const auto& f : required) {
        const fs::path p = fs::path(dir) / f;
        if (!fs::exists(p)) throw ConfigError("export_bundle: missing artifact " + p.string());
        found.push_back(p.string());
    }
    // Re-assert boundary monotonicity on export from the written CSV.
    std::ifstream in(fs::path(dir) / "boundaries_xy.csv");
    std::string line;
    std::getline(in, line);
    double prev_b1 = std::numeric_limits<double>::infinity();
    double prev_b2 = std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string yv, b1v, b2v;
        std::getline(row, yv, ',');
        std::getline(row, b1v, ',');
        std::getline(row, b2v, ',');
        // one-cell interpolation slack on the monotone decrease
        const double slack = 1.12;
        if (!b1v.empty()) {
            const double b1 = std::strtod(b1v.c_str(), nullptr);
            if (b1 > prev_b1 * slack) {
                throw ConfigError("export_bundle: b1 not non-increasing in the exported CSV");
            }
            prev_b1 = std::min(prev_b1, b1);
        }
        if (!b2v.empty()) {
            const double b2 = std::strtod(b2v.c_str(), nullptr);
            if (b2 > prev_b2 * slack) {
                throw ConfigError("export_bundle: b2 not non-increasing in the exported CSV");
            }
            prev_b2 = std::min(prev_b2, b2);
        }
    }
    // Manifest hash must match the input configuration.
    std::ifstream mf(fs::path(dir) / "manifest.json");
    std::ostringstream buf;
    buf << mf.rdbuf();
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, rc.config_hash);
    if (buf.str().find(hash) == std::string::npos) {
        throw ConfigError("export_bundle: manifest hash does not match the configuration");
    }
    const fs::path checks = fs::path(dir) / "checks.json";
    if (fs::exists(checks)) found.push_back(checks.string());
    return found;
}

}  // namespace gamecall
