#include "gamecall/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace gamecall {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, const std::string& key, int line) {
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' needs a decimal literal, got '" + t + "'");
    }
    return x;
}

long parse_integer(const std::string& v, const std::string& key, int line) {
    const double x = parse_number(v, key, line);
    const long n = static_cast<long>(x);
    if (static_cast<double>(n) != x) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' needs an integer, got '" + trim(v) + "'");
    }
    return n;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
    RunConfig rc;
    rc.source_path = source_name;
    rc.config_hash = fnv1a64(text);

    double mr = -1, md = -1, ms = -1, mk = -1, mp = -1;
    bool saw_model = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            }
            section = trim(s.substr(1, s.size() - 2));
            if (section != "model" && section != "grid" && section != "sim" &&
                section != "output" && section != "checks") {
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" +
                                  section + "]");
            }
            if (section == "model") saw_model = true;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                              "' outside of any section");
        }
        if (section == "model") {
            if (key == "r") mr = parse_number(val, key, line);
            else if (key == "delta0") md = parse_number(val, key, line);
            else if (key == "sigma") ms = parse_number(val, key, line);
            else if (key == "strike") mk = parse_number(val, key, line);
            else if (key == "penalty") mp = parse_number(val, key, line);
            else throw ConfigError("line " + std::to_string(line) + ": unknown [model] key '" + key + "'");
        } else if (section == "grid") {
            if (key == "nz") rc.grid_nz = static_cast<int>(parse_integer(val, key, line));
            else if (key == "ny") rc.grid_ny = static_cast<int>(parse_integer(val, key, line));
            else if (key == "ymin") rc.grid_ymin = parse_number(val, key, line);
            else if (key == "xlo") rc.grid_xlo = parse_number(val, key, line);
            else if (key == "xhi") rc.grid_xhi = parse_number(val, key, line);
            else if (key == "zmin") rc.grid_zmin = parse_number(val, key, line);
            else if (key == "zmax") rc.grid_zmax = parse_number(val, key, line);
            else throw ConfigError("line " + std::to_string(line) + ": unknown [grid] key '" + key + "'");
        } else if (section == "sim") {
            if (key == "dt") rc.sim.dt = parse_number(val, key, line);
            else if (key == "horizon") {
                rc.sim.horizon = parse_number(val, key, line);
                rc.horizon_auto = rc.sim.horizon <= 0.0;
            } else if (key == "npaths") rc.sim.n_paths = parse_integer(val, key, line);
            else if (key == "seed") rc.sim.seed = static_cast<std::uint64_t>(parse_integer(val, key, line));
            else throw ConfigError("line " + std::to_string(line) + ": unknown [sim] key '" + key + "'");
        } else if (section == "output") {
            if (key == "dir") rc.output_dir = val;
            else throw ConfigError("line " + std::to_string(line) + ": unknown [output] key '" + key + "'");
        } else {  // checks
            if (key == "names") {
                std::istringstream cs(val);
                std::string name;
                while (std::getline(cs, name, ',')) {
                    name = trim(name);
                    if (!name.empty()) rc.check_names.push_back(name);
                }
            } else if (key == "slack_multiplier") {
                rc.slack_multiplier = parse_number(val, key, line);
            } else {
                throw ConfigError("line " + std::to_string(line) + ": unknown [checks] key '" + key + "'");
            }
        }
    }

    if (!saw_model) throw ConfigError("missing [model] section");
    auto need = [&](double v, const char* key) {
        if (v < 0) throw ConfigError(std::string("missing [model] key '") + key + "'");
    };
    need(mr, "r");
    need(md, "delta0");
    need(ms, "sigma");
    need(mk, "strike");
    need(mp, "penalty");
    rc.model = ModelParams::validate(mr, md, ms, mk, mp);
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace gamecall
