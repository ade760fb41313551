#include "gamecall/paths.hpp"

#include <cmath>
#include <string>

namespace gamecall {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

PathBatch simulate_filtered(const ModelParams& m, const StatePoint& start,
                            const SimConfig& cfg) {
    cfg.check();
    if (!(start.y >= 0.0 && start.y <= 1.0))
        throw ConfigError("simulate_filtered: y0 must be in [0,1]");
    if (!(start.x > 0.0)) throw ConfigError("simulate_filtered: x0 must be positive");

    const long nsteps = cfg.n_steps();
    const long npaths = cfg.n_paths;
    const double dt = cfg.dt, sqdt = std::sqrt(dt);
    const double vol_y = m.delta0 / m.sigma;
    const bool degenerate = (start.y == 0.0 || start.y == 1.0);

    PathBatch b;
    b.seed = cfg.seed;
    b.start = start;
    b.times.resize(nsteps + 1);
    for (long n = 0; n <= nsteps; ++n) b.times[n] = n * dt;
    b.z_values.resize(nsteps + 1);
    double z0 = kNaN;
    if (!degenerate) {
        z0 = to_z(start, m).z;
        for (long n = 0; n <= nsteps; ++n) b.z_values[n] = z0 + m.k * b.times[n];
    } else {
        b.z_values.setConstant(kNaN);
    }
    b.y.resize(npaths, nsteps + 1);
    b.x.resize(npaths, nsteps + 1);
    b.dw.resize(npaths, nsteps);

    for (long p = 0; p < npaths; ++p) {
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(p));
        double y = start.y;
        double x = start.x;
        bool absorbed = degenerate;
        b.y(p, 0) = y;
        b.x(p, 0) = x;
        for (long n = 0; n < nsteps; ++n) {
            const double dw = sqdt * rng.normal();
            b.dw(p, n) = dw;
            if (!absorbed) {
                double ynew = y - vol_y * y * (1.0 - y) * dw;
                if (ynew <= 0.0) {
                    ynew = 0.0;
                    absorbed = true;
                } else if (ynew >= 1.0) {
                    ynew = 1.0;
                    absorbed = true;
                }
                y = ynew;
            }
            if (!absorbed) {
                x = transform_f(z0 + m.k * b.times[n + 1], y, m);
            } else {
                // frozen posterior: exact geometric update with drift r - d0*y
                x *= std::exp((m.r - m.delta0 * y - 0.5 * m.sigma * m.sigma) * dt +
                              m.sigma * dw);
            }
            b.y(p, n + 1) = y;
            b.x(p, n + 1) = x;
        }
    }
    return b;
}

Eigen::MatrixXd simulate_scenario(const ModelParams& m, double x0, int d,
                                  const SimConfig& cfg) {
    cfg.check();
    if (!(x0 > 0.0)) throw ConfigError("simulate_scenario: x0 must be positive");
    const long nsteps = cfg.n_steps();
    const double dt = cfg.dt, sqdt = std::sqrt(dt);
    const double drift = (m.r - m.delta0 * (d != 0 ? 1.0 : 0.0) - 0.5 * m.sigma * m.sigma) * dt;

    Eigen::MatrixXd s(cfg.n_paths, nsteps + 1);
    for (long p = 0; p < cfg.n_paths; ++p) {
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(p));
        double x = x0;
        s(p, 0) = x;
        for (long n = 0; n < nsteps; ++n) {
            x *= std::exp(drift + m.sigma * sqdt * rng.normal());
            s(p, n + 1) = x;
        }
    }
    return s;
}

Eigen::MatrixXd exact_filter(const ModelParams& m, const Eigen::MatrixXd& s_paths,
                             double x0, double y0, double dt) {
    if (!(y0 > 0.0 && y0 < 1.0))
        throw SingularTransform("exact_filter: y0 must be in (0,1)");
    const double logit0 = std::log(y0 / (1.0 - y0));
    const double inv_ratio = m.delta0 / (m.sigma * m.sigma);
    const double lx0 = std::log(x0);

    Eigen::MatrixXd y(s_paths.rows(), s_paths.cols());
    for (long p = 0; p < s_paths.rows(); ++p) {
        for (long n = 0; n < s_paths.cols(); ++n) {
            const double t = n * dt;
            const double l = logit0 + inv_ratio * (lx0 + m.k * t - std::log(s_paths(p, n)));
            y(p, n) = l >= 0.0 ? 1.0 / (1.0 + std::exp(-l)) : std::exp(l) / (1.0 + std::exp(l));
        }
    }
    return y;
}

void flow_derivative(const ModelParams& m, PathBatch& batch) {
    const long npaths = batch.y.rows();
    const long nsteps = batch.dw.cols();
    const double vol_y = m.delta0 / m.sigma;
    Eigen::MatrixXd u(npaths, nsteps + 1);
    for (long p = 0; p < npaths; ++p) {
        double up = 1.0;
        u(p, 0) = up;
        for (long n = 0; n < nsteps; ++n) {
            up *= 1.0 - vol_y * (1.0 - 2.0 * batch.y(p, n)) * batch.dw(p, n);
            u(p, n + 1) = up;
        }
    }
    batch.u = std::move(u);
}

double interp_curve(const Eigen::VectorXd& grid, const Eigen::VectorXd& values, double at) {
    const int n = static_cast<int>(grid.size());
    if (n < 2 || at < grid[0] || at > grid[n - 1]) return kNaN;
    const double step = (grid[n - 1] - grid[0]) / (n - 1);
    int i = std::min(static_cast<int>((at - grid[0]) / step), n - 2);
    const double t = (at - grid[i]) / (grid[i + 1] - grid[i]);
    const double a = values[i], b = values[i + 1];
    if (std::isnan(a) || std::isnan(b)) return kNaN;
    return (1.0 - t) * a + t * b;
}

BoundaryOnPath boundaries_along(const ModelParams& m, const FreeBoundaries& fb, double z0,
                                const Eigen::VectorXd& times) {
    const long n = times.size();
    const double zmin = fb.z[0], zmax = fb.z[fb.z.size() - 1];
    BoundaryOnPath bp;
    bp.c1.resize(n);
    bp.c2.resize(n);
    bp.yk.resize(n);
    for (long i = 0; i < n; ++i) {
        const double z = z0 + m.k * times[i];
        if (z < zmin || z > zmax) {
            throw OutOfDomain("boundaries_along: path z=" + std::to_string(z) +
                              " leaves the solved range [" + std::to_string(zmin) + ", " +
                              std::to_string(zmax) + "]");
        }
        bp.c1[i] = interp_curve(fb.z, fb.c1, z);
        bp.c2[i] = interp_curve(fb.z, fb.c2, z);
        bp.yk[i] = y_k_curve(z, m);
    }
    return bp;
}

double hitting_time(const ModelParams& m, const FreeBoundaries& fb,
                    const Eigen::VectorXd& times, const Eigen::VectorXd& y_path, double z0,
                    TargetRegion target, double y_shift) {
    const BoundaryOnPath bp = boundaries_along(m, fb, z0, times);
    for (long i = 0; i < times.size(); ++i) {
        const double y = y_path[i];
        if (target == TargetRegion::S1) {
            const double c1 = bp.c1[i];
            if (!std::isnan(c1) && y <= c1 + y_shift) return times[i];
        } else {
            const double c2 = bp.c2[i];
            if (!std::isnan(c2) && y >= c2 + y_shift && y <= bp.yk[i]) return times[i];
        }
    }
    return kInf;
}

namespace {

// Largest finite b1 at the smallest row y above `yq`, linear in between;
// falls back to the largest finite b1 when yq lies below the sampled rows.
double b1_at(const FreeBoundaries& fb, double yq) {
    const int n = static_cast<int>(fb.y.size());
    int lo = -1, hi = -1;
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(fb.b1[j])) continue;
        if (fb.y[j] <= yq) lo = j;
        if (fb.y[j] >= yq && hi < 0) hi = j;
    }
    if (lo >= 0 && hi >= 0 && lo != hi) {
        const double t = (yq - fb.y[lo]) / (fb.y[hi] - fb.y[lo]);
        return (1.0 - t) * fb.b1[lo] + t * fb.b1[hi];
    }
    if (hi >= 0) return fb.b1[hi];
    double best = kNaN;
    for (int j = 0; j < n; ++j)
        if (std::isfinite(fb.b1[j])) best = std::isnan(best) ? fb.b1[j] : std::max(best, fb.b1[j]);
    return best;
}

// c1 at z, geometrically extrapolated below the sampled range at the rate
// delta0/(sigma^2 - delta0) implied by the tail bound of the value function.
double c1_extrapolated(const ModelParams& m, const FreeBoundaries& fb, double z) {
    double v = interp_curve(fb.z, fb.c1, z);
    if (std::isfinite(v)) return v;
    int first = -1, last = -1;
    for (int i = 0; i < fb.z.size(); ++i) {
        if (std::isfinite(fb.c1[i])) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) return kNaN;
    if (z <= fb.z[first]) {
        const double rate = m.delta0 / std::max(m.sigma * m.sigma - m.delta0, 1e-12);
        return fb.c1[first] * std::exp((z - fb.z[first]) * rate);
    }
    return fb.c1[last];
}

}  // namespace

double continuation_x_bound(const ModelParams& m, const FreeBoundaries& fb, double z0,
                            double t) {
    if (m.k > 0.0) {
        const double c = interp_curve(fb.z, fb.c1, z0);
        const double cc = std::isfinite(c) ? c : c1_extrapolated(m, fb, z0);
        if (!std::isfinite(cc)) throw OutOfDomain("continuation_x_bound: c1 unavailable at z0");
        const double b = b1_at(fb, cc);
        if (!std::isfinite(b)) throw OutOfDomain("continuation_x_bound: b1 unavailable");
        return b;
    }
    const double zt = z0 + m.k * t;
    const double c = c1_extrapolated(m, fb, zt);
    if (!std::isfinite(c) || c <= 0.0)
        throw OutOfDomain("continuation_x_bound: c1 extrapolation failed");
    return transform_f(zt, std::min(c, 1.0 - 1e-12), m);
}

double default_horizon(const ModelParams& m, const FreeBoundaries& fb, double z0,
                       double bias_target) {
    if (m.k > 0.0) {
        const double a = continuation_x_bound(m, fb, z0, 0.0);
        return std::log((a + m.penalty) / bias_target) / m.r;
    }
    double t = 1.0;
    for (int it = 0; it < 400; ++it) {
        const double bound = continuation_x_bound(m, fb, z0, t);
        if (std::exp(-m.r * t) * (bound + m.penalty) <= bias_target) return t;
        t *= 1.2;
    }
    throw NoConvergence("default_horizon: bias target unreachable (k<0)");
}

}  // namespace gamecall
