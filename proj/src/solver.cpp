#include "gamecall/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace gamecall {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Edge value in w coordinates with exact piecewise cancellation: returns
// V_edge(x) - (x - K), optionally for payoffs capped at level n.
double edge_w(const EdgeValueFn& fn, double x, const std::optional<double>& cap) {
    double w;
    if (fn.side == EdgeSide::y1_edge) {
        if (x >= fn.x_upper) {
            w = 0.0;  // S1 piece: V = x - K exactly
        } else if (fn.case_id == CaseId::Case4 && x >= fn.strike && x <= fn.x_lower) {
            w = fn.penalty;  // S2 piece
        } else {
            w = fn(x) - (x - fn.strike);
        }
    } else {
        if (fn.case_id == CaseId::Case1) {
            w = fn.strike;  // V0 = x
        } else if (x >= fn.strike) {
            w = fn.penalty;  // S2 edge piece
        } else {
            w = fn.penalty * x / fn.strike - (x - fn.strike);
        }
    }
    if (cap) {
        // min(V, n-K) - (x-K) = min(w, n-x) in w coordinates.
        w = std::min(w, *cap - x);
    }
    return w;
}

struct SliceWork {
    Eigen::ArrayXd f;    // F(z_i, y_j) along the slice
    Eigen::ArrayXd w1;   // lower obstacle in w space
    Eigen::ArrayXd rhs;  // transport + source
};

}  // namespace

static ValueSurface solve_impl(const ModelParams& m, const GridSpec& g,
                               std::optional<double> cap, const SolveOptions& opt) {
    g.check();
    if (cap && !(*cap > m.strike)) {
        throw ConfigError("solve_truncated: cap must exceed the strike");
    }

    ValueSurface s;
    s.grid = g;
    s.params = m;
    s.cap = cap;
    s.complete_info = classify_case(m);
    s.tol_active = opt.tol_active * m.strike;

    const int nz = g.n_z, ny = g.n_y;
    const double dz = g.dz(), dl = g.dlambda();
    const double K = m.strike, eps0 = m.penalty;
    const double diff = m.delta0 * m.delta0 / (2.0 * m.sigma * m.sigma);
    const double mu = dz / std::fabs(m.k);

    Eigen::ArrayXd yv(ny), lamv(ny);
    for (int j = 0; j < ny; ++j) {
        yv[j] = g.y_at(j);
        lamv[j] = g.lambda_at(j);
    }

    // Tridiagonal coefficients (constant across slices in the lambda form).
    Eigen::ArrayXd cl(ny), cu(ny), dg(ny);
    for (int j = 0; j < ny; ++j) {
        const double drift = diff * (2.0 * yv[j] - 1.0);
        cl[j] = mu * (diff / (dl * dl) - drift / (2.0 * dl));
        cu[j] = mu * (diff / (dl * dl) + drift / (2.0 * dl));
        dg[j] = 1.0 + mu * m.r + cl[j] + cu[j];
        if (!(cl[j] > 0.0 && cu[j] > 0.0)) {
            throw ConfigError("solve: lambda grid too coarse for a monotone stencil");
        }
    }

    const EdgeValueFn v0 = edge_value(EdgeSide::y0_edge, m, s.complete_info);
    const EdgeValueFn v1 = edge_value(EdgeSide::y1_edge, m, s.complete_info);

    // A1/A2 caps for the bottom data: the seller's region cannot extend past
    // x2cap at height y_min, the buyer's must start by x1cap.
    const double x2cap = m.r * (K - eps0) / (m.delta0 * g.y_min);
    const double x1cap = m.r * K / (m.delta0 * g.y_min);
    auto bottom_w = [&](double x) {
        double w = edge_w(v0, x, cap);
        if (eps0 < K && x > x2cap && x1cap > x2cap) {
            double ramp = eps0 * std::log(x1cap / x) / std::log(x1cap / x2cap);
            ramp = std::clamp(ramp, 0.0, eps0);
            w = std::min(w, ramp);
        }
        return w;
    };

    auto slice_f = [&](int i, Eigen::ArrayXd& f) {
        const double zi = g.z_at(i);
        for (int j = 0; j < ny; ++j) {
            double lf = zi - m.ratio * lamv[j];
            if (lf > 700.0) lf = 700.0;
            f[j] = std::exp(lf);
        }
    };
    auto lower_obstacle = [&](const Eigen::ArrayXd& f, Eigen::ArrayXd& w1) {
        for (int j = 0; j < ny; ++j) {
            const double fc = cap ? std::min(f[j], *cap) : f[j];
            const double g1 = fc > K ? fc - K : 0.0;
            w1[j] = g1 - (f[j] - K);
        }
    };

    s.w.resize(nz, ny);
    s.v.resize(nz, ny);
    s.region.resize(nz, ny);

    const bool up = m.k < 0.0;  // march toward increasing z when k < 0
    const int i0 = up ? 0 : nz - 1;

    Eigen::ArrayXd f(ny), w1(ny), rhs(ny), wi(ny);

    slice_f(i0, f);
    lower_obstacle(f, w1);
    for (int j = 0; j < ny; ++j) s.w(i0, j) = w1[j];
    s.w(i0, 0) = std::clamp(bottom_w(f[0]), w1[0], w1[0] + eps0);
    s.w(i0, ny - 1) = std::clamp(edge_w(v1, f[ny - 1], cap), w1[ny - 1], w1[ny - 1] + eps0);

    const double tol = opt.psor_tol * K;
    bool first_step = true;
    for (int i = up ? 1 : nz - 2; up ? i < nz : i >= 0; i += up ? 1 : -1) {
        const int prev = up ? i - 1 : i + 1;
        slice_f(i, f);
        lower_obstacle(f, w1);
        for (int j = 0; j < ny; ++j) {
            const double src = m.delta0 * yv[j] * f[j] - m.r * K;
            rhs[j] = s.w(prev, j) - mu * src;
            wi[j] = s.w(prev, j);
        }
        wi[0] = std::clamp(bottom_w(f[0]), w1[0], w1[0] + eps0);
        wi[ny - 1] = std::clamp(edge_w(v1, f[ny - 1], cap), w1[ny - 1], w1[ny - 1] + eps0);

        long sweep = 0;
        double res = 0.0;
        for (; sweep < opt.sweep_budget; ++sweep) {
            for (int j = 1; j < ny - 1; ++j) {
                const double gs = (rhs[j] + cl[j] * wi[j - 1] + cu[j] * wi[j + 1]) / dg[j];
                double x = wi[j] + opt.omega * (gs - wi[j]);
                const double lo = w1[j], hi = w1[j] + eps0;
                wi[j] = x < lo ? lo : (x > hi ? hi : x);
            }
            res = 0.0;
            for (int j = 1; j < ny - 1; ++j) {
                double rj = dg[j] * wi[j] - cl[j] * wi[j - 1] - cu[j] * wi[j + 1] - rhs[j];
                if (wi[j] <= w1[j] + 1e-14) {
                    rj = std::min(rj, 0.0);
                } else if (wi[j] >= w1[j] + eps0 - 1e-14) {
                    rj = std::max(rj, 0.0);
                }
                res = std::max(res, std::fabs(rj));
            }
            if (res < tol) break;
        }
        if (sweep >= opt.sweep_budget) {
            throw NoConvergenceAtSlice("PSOR budget exhausted at slice z=" +
                                       std::to_string(g.z_at(i)) + ", residual " +
                                       std::to_string(res));
        }
        s.total_sweeps += sweep + 1;
        s.max_lcp_residual = std::max(s.max_lcp_residual, res);
        for (int j = 0; j < ny; ++j) s.w(i, j) = wi[j];

        if (first_step) {
            first_step = false;
            if (!up) {
                int active = 0;
                for (int j = 1; j < ny - 1; ++j)
                    if (wi[j] - w1[j] <= s.tol_active) ++active;
                if (active < 0.99 * (ny - 2)) {
                    throw DomainTooSmall(
                        "initial slice not obstacle-active (k>0): widen the z range");
                }
            } else {
                double worst = 0.0;
                for (int j = 1; j < ny - 1; ++j) worst = std::max(worst, wi[j] - w1[j]);
                if (worst > 1e-3 * K) {
                    throw DomainTooSmall(
                        "initial slice value not negligible (k<0): widen the z range");
                }
            }
        }
    }

    // Reconstruct v and label regions.
    for (int i = 0; i < nz; ++i) {
        slice_f(i, f);
        lower_obstacle(f, w1);
        for (int j = 0; j < ny; ++j) {
            s.v(i, j) = s.w(i, j) + f[j] - K;
            Region reg = Region::C;
            if (f[j] >= K) {
                if (s.w(i, j) - w1[j] <= s.tol_active) {
                    reg = Region::S1;
                } else if (w1[j] + eps0 - s.w(i, j) <= s.tol_active) {
                    reg = Region::S2;
                }
            }
            s.region(i, j) = static_cast<std::uint8_t>(reg);
        }
    }
    return s;
}

ValueSurface solve(const ModelParams& m, const GridSpec& g, const SolveOptions& opt) {
    return solve_impl(m, g, std::nullopt, opt);
}

ValueSurface solve_truncated(const ModelParams& m, const GridSpec& g, double n,
                             const SolveOptions& opt) {
    return solve_impl(m, g, n, opt);
}

namespace {

// Sub-cell boundary position from two continuation-side nodes (the node
// adjacent to the active set is skipped: it carries the scheme's boundary
// layer). The detachment vanishes quadratically under smooth fit, so sqrt of
// it is locally linear; extrapolate that line to zero.
double sqrt_extrapolate(double pos_a, double pos_b, double d_a, double d_b, double lo,
                        double hi) {
    const double sa = std::sqrt(std::max(d_a, 0.0));
    const double sb = std::sqrt(std::max(d_b, 0.0));
    if (!(sb > sa)) return std::clamp(pos_a, lo, hi);
    const double pos = pos_a + sa * (pos_a - pos_b) / (sb - sa);
    return std::clamp(pos, lo, hi);
}

}  // namespace

FreeBoundaries extract_boundaries(const ValueSurface& s) {
    const int nz = s.nz(), ny = s.ny();
    const GridSpec& g = s.grid;
    const ModelParams& m = s.params;
    const double eps0 = m.penalty;

    FreeBoundaries fb;
    fb.z.resize(nz);
    fb.c1 = Eigen::VectorXd::Constant(nz, kNaN);
    fb.c2 = Eigen::VectorXd::Constant(nz, kNaN);
    fb.yk.resize(nz);
    fb.y.resize(ny);
    fb.b1 = Eigen::VectorXd::Constant(ny, kNaN);
    fb.b2 = Eigen::VectorXd::Constant(ny, kNaN);
    for (int i = 0; i < nz; ++i) {
        fb.z[i] = g.z_at(i);
        fb.yk[i] = y_k_curve(g.z_at(i), m);
    }
    for (int j = 0; j < ny; ++j) fb.y[j] = g.y_at(j);

    auto dS1 = [&](int i, int j) { return s.w(i, j) - s.w_lower(i, j); };
    auto dS2 = [&](int i, int j) { return s.w_lower(i, j) + eps0 - s.w(i, j); };
    auto isS1 = [&](int i, int j) { return s.region(i, j) == static_cast<std::uint8_t>(Region::S1); };
    auto isS2 = [&](int i, int j) { return s.region(i, j) == static_cast<std::uint8_t>(Region::S2); };

    bool any_s1 = false;
    int last_s2_slice = -1;

    // Row scans in z: b1 from the first S1 crossing, b2 from the last S2 one.
    for (int j = 1; j < ny - 1; ++j) {
        int i1 = -1;
        for (int i = 1; i < nz - 1; ++i) {
            if (isS1(i, j)) {
                i1 = i;
                break;
            }
        }
        if (i1 >= 0) {
            any_s1 = true;
            double zs;
            if (i1 >= 3) {
                zs = sqrt_extrapolate(g.z_at(i1 - 2), g.z_at(i1 - 3), dS1(i1 - 2, j),
                                      dS1(i1 - 3, j), g.z_at(i1 - 2), g.z_at(i1));
            } else {
                zs = g.z_at(i1);
            }
            fb.b1[j] = transform_f(zs, g.y_at(j), m);
        }
        int i2 = -1;
        for (int i = nz - 2; i >= 1; --i) {
            if (isS2(i, j)) {
                i2 = i;
                break;
            }
        }
        if (i2 >= 0) {
            double zs;
            if (i2 <= nz - 4) {
                zs = sqrt_extrapolate(g.z_at(i2 + 2), g.z_at(i2 + 3), dS2(i2 + 2, j),
                                      dS2(i2 + 3, j), g.z_at(i2), g.z_at(i2 + 2));
            } else {
                zs = g.z_at(i2);
            }
            fb.b2[j] = transform_f(zs, g.y_at(j), m);
        }
    }

    // Slice scans in y(lambda): c1 from the topmost S1 node, c2 from the
    // lowest S2 node.
    const double dl = g.dlambda();
    auto logistic = [](double l) {
        return l >= 0.0 ? 1.0 / (1.0 + std::exp(-l)) : std::exp(l) / (1.0 + std::exp(l));
    };
    for (int i = 1; i < nz - 1; ++i) {
        int jt = -1;
        for (int j = ny - 2; j >= 1; --j) {
            if (isS1(i, j)) {
                jt = j;
                break;
            }
        }
        if (jt >= 0) {
            double ls;
            if (jt <= ny - 4) {
                ls = sqrt_extrapolate(g.lambda_at(jt + 2), g.lambda_at(jt + 3), dS1(i, jt + 2),
                                      dS1(i, jt + 3), g.lambda_at(jt), g.lambda_at(jt + 2));
            } else {
                ls = g.lambda_at(jt);
            }
            fb.c1[i] = logistic(ls);
        }
        int jb = -1;
        for (int j = 1; j < ny - 1; ++j) {
            if (isS2(i, j)) {
                jb = j;
                break;
            }
        }
        if (jb >= 0) {
            last_s2_slice = std::max(last_s2_slice, i);
            double ls;
            if (jb >= 3) {
                ls = sqrt_extrapolate(g.lambda_at(jb - 2), g.lambda_at(jb - 3), dS2(i, jb - 2),
                                      dS2(i, jb - 3), g.lambda_at(jb - 2), g.lambda_at(jb));
            } else {
                ls = g.lambda_at(jb);
            }
            fb.c2[i] = std::min(logistic(ls), fb.yk[i]);
        }
    }
    (void)dl;

    if (!any_s1) {
        throw EmptyRegion("extract_boundaries: S1 is empty on the grid - widen the z range");
    }
    fb.s2_empty = last_s2_slice < 0;
    if (!fb.s2_empty) {
        fb.z_K = g.z_at(last_s2_slice);
        fb.b2_at_K = y_k_curve(fb.z_K, m);
    }

    // y -> 1 buyer threshold: phase-averaged boundary over the top band.
    double acc = 0.0;
    int cnt = 0;
    for (int j = 1; j < ny - 1; ++j) {
        const double yj = g.y_at(j);
        if (yj >= 0.97 && yj <= 1.0 - g.y_min * 0.5 && std::isfinite(fb.b1[j])) {
            acc += fb.b1[j];
            ++cnt;
        }
    }
    if (cnt >= 8) fb.y1_buyer_threshold = acc / cnt;
    return fb;
}

double value_at(const ValueSurface& s, double x, double y) {
    const GridSpec& g = s.grid;
    if (!(y > 0.0 && y < 1.0) || !(x > 0.0)) return kNaN;
    const double lam = std::log(y / (1.0 - y));
    const double lmax = g.lambda_max();
    if (lam < -lmax || lam > lmax) return kNaN;
    const double z = std::log(x) + s.params.ratio * lam;
    if (z < g.z_min || z > g.z_max) return kNaN;
    const double fz = (z - g.z_min) / g.dz();
    const double fl = (lam + lmax) / g.dlambda();
    int i = std::min(static_cast<int>(fz), g.n_z - 2);
    int j = std::min(static_cast<int>(fl), g.n_y - 2);
    const double tz = fz - i, tl = fl - j;
    return (1 - tz) * ((1 - tl) * s.v(i, j) + tl * s.v(i, j + 1)) +
           tz * ((1 - tl) * s.v(i + 1, j) + tl * s.v(i + 1, j + 1));
}

double value_at_yclamped(const ValueSurface& s, double x, double y) {
    const GridSpec& g = s.grid;
    const double ylo = g.y_at(0), yhi = g.y_at(g.n_y - 1);
    const double yc = std::clamp(y, ylo * (1.0 + 1e-12), yhi * (1.0 - 1e-12));
    return value_at(s, x, yc);
}

Eigen::MatrixXd surface_to_xy(const ValueSurface& s, const std::vector<double>& xs,
                              const std::vector<double>& ys) {
    Eigen::MatrixXd out(static_cast<int>(xs.size()), static_cast<int>(ys.size()));
    for (size_t a = 0; a < xs.size(); ++a)
        for (size_t b = 0; b < ys.size(); ++b)
            out(static_cast<int>(a), static_cast<int>(b)) = value_at(s, xs[a], ys[b]);
    return out;
}

namespace {
double median_of(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

SmoothFitReport smoothfit_report(const ValueSurface& s, const FreeBoundaries& fb) {
    const int nz = s.nz(), ny = s.ny();
    const GridSpec& g = s.grid;
    SmoothFitReport rep;
    rep.z_K = fb.z_K;
    const double excl_halfwidth = 10.0 * g.dz();
    const bool flag_exceptional = s.params.k > 0.0 && !fb.s2_empty;
    rep.exceptional_point_flagged = flag_exceptional;

    auto isS1 = [&](int i, int j) { return s.region(i, j) == static_cast<std::uint8_t>(Region::S1); };
    auto isS2 = [&](int i, int j) { return s.region(i, j) == static_cast<std::uint8_t>(Region::S2); };

    std::vector<std::pair<double, double>> c1_jumps, c2_jumps;
    for (int i = 1; i < nz - 1; ++i) {
        SmoothFitSlice sl;
        sl.z = g.z_at(i);
        sl.excluded = flag_exceptional && std::isfinite(fb.z_K) &&
                      std::fabs(sl.z - fb.z_K) <= excl_halfwidth;
        int jt = -1, jb = -1;
        for (int j = ny - 2; j >= 1; --j)
            if (isS1(i, j)) {
                jt = j;
                break;
            }
        if (jt >= 1 && jt + 2 <= ny - 2) {
            sl.jump_c1 = std::fabs((s.w(i, jt + 2) - s.w(i, jt + 1)) /
                                   (g.y_at(jt + 2) - g.y_at(jt + 1)));
            if (!sl.excluded) c1_jumps.push_back({sl.z, sl.jump_c1});
        }
        for (int j = 1; j < ny - 1; ++j)
            if (isS2(i, j)) {
                jb = j;
                break;
            }
        if (jb >= 3) {
            sl.jump_c2 = std::fabs((s.w(i, jb - 1) - s.w(i, jb - 2)) /
                                   (g.y_at(jb - 1) - g.y_at(jb - 2)));
            if (!sl.excluded) c2_jumps.push_back({sl.z, sl.jump_c2});
        }
        // w is exactly flat inside S2 on {F >= K}; track the worst deviation.
        if (jb >= 1) {
            for (int j = jb + 1; j < ny - 2; ++j) {
                if (isS2(i, j) && isS2(i, j + 1) && s.f_at(i, j + 1) >= s.params.strike) {
                    rep.max_wy_inside_s2 =
                        std::max(rep.max_wy_inside_s2,
                                 std::fabs((s.w(i, j + 1) - s.w(i, j)) /
                                           (g.y_at(j + 1) - g.y_at(j))));
                }
            }
        }
        rep.slices.push_back(sl);
    }

    auto interquartile_median = [](std::vector<std::pair<double, double>>& v) {
        if (v.size() < 8) return kNaN;
        std::sort(v.begin(), v.end());
        const size_t lo = v.size() / 4, hi = v.size() - v.size() / 4;
        std::vector<double> mid;
        for (size_t i = lo; i < hi; ++i) mid.push_back(v[i].second);
        return median_of(mid);
    };
    rep.median_jump_c1 = interquartile_median(c1_jumps);
    rep.median_jump_c2 = interquartile_median(c2_jumps);
    return rep;
}

PdeResidualReport pde_residual(const ValueSurface& s) {
    const int nz = s.nz(), ny = s.ny();
    const GridSpec& g = s.grid;
    const ModelParams& m = s.params;
    const double dz = g.dz(), dl = g.dlambda();
    const double diff = m.delta0 * m.delta0 / (2.0 * m.sigma * m.sigma);
    const bool up = m.k < 0.0;

    PdeResidualReport rep;
    rep.scaling_bound = 1e-6 * m.strike * (1.0 / dz + 1.0 / (dl * dl));
    rep.min_source_on_s1 = std::numeric_limits<double>::infinity();
    rep.max_excess_on_s2 = -std::numeric_limits<double>::infinity();

    auto reg = [&](int i, int j) { return s.region_at(i, j); };
    for (int i = 1; i < nz - 1; ++i) {
        for (int j = 1; j < ny - 1; ++j) {
            const Region rr = reg(i, j);
            const bool interior = reg(i - 1, j) == rr && reg(i + 1, j) == rr &&
                                  reg(i, j - 1) == rr && reg(i, j + 1) == rr;
            if (!interior) continue;
            const double f = s.f_at(i, j);
            const double src = m.delta0 * g.y_at(j) * f - m.r * m.strike;
            if (rr == Region::C) {
                const int prev = up ? i - 1 : i + 1;
                const double wz = (s.w(prev, j) - s.w(i, j)) / (g.z_at(prev) - g.z_at(i));
                const double wll = (s.w(i, j - 1) - 2.0 * s.w(i, j) + s.w(i, j + 1)) / (dl * dl);
                const double wl = (s.w(i, j + 1) - s.w(i, j - 1)) / (2.0 * dl);
                const double res = m.k * wz + diff * wll + diff * (2.0 * g.y_at(j) - 1.0) * wl -
                                   m.r * s.w(i, j) - src;
                rep.max_c_residual = std::max(rep.max_c_residual, std::fabs(res));
                ++rep.c_nodes;
            } else if (rr == Region::S1) {
                rep.min_source_on_s1 = std::min(rep.min_source_on_s1, src);
                ++rep.s1_nodes;
            } else {
                rep.max_excess_on_s2 = std::max(rep.max_excess_on_s2, src + m.r * m.penalty);
                ++rep.s2_nodes;
            }
        }
    }
    return rep;
}

InvariantReport check_invariants(const ValueSurface& s, int layer_rows) {
    const int nz = s.nz(), ny = s.ny();
    InvariantReport rep;
    rep.boundary_layer_rows = layer_rows;
    rep.w_monotonicity_checked = s.params.assumption_ratio_ok;
    rep.min_z_increment = std::numeric_limits<double>::infinity();
    rep.min_w_y_increment = std::numeric_limits<double>::infinity();

    const int jlo = 1 + layer_rows, jhi = ny - 2 - layer_rows;
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double lo = s.w_lower(i, j), hi = lo + s.params.penalty;
            rep.sandwich_violation = std::max(
                rep.sandwich_violation, std::max(lo - s.w(i, j), s.w(i, j) - hi));
            if (s.region(i, j) != static_cast<std::uint8_t>(Region::C)) {
                // labels are exclusive by construction (W2 - W1 = eps0 >> tol)
                const bool s1 = s.w(i, j) - lo <= s.tol_active;
                const bool s2 = hi - s.w(i, j) <= s.tol_active;
                if (s1 && s2) rep.labels_exclusive = false;
            }
        }
    }
    for (int j = jlo; j <= jhi; ++j) {
        for (int i = 0; i + 1 < nz; ++i) {
            rep.min_z_increment = std::min(rep.min_z_increment, s.v(i + 1, j) - s.v(i, j));
        }
    }
    if (rep.w_monotonicity_checked) {
        for (int i = 1; i < nz - 1; ++i) {
            for (int j = jlo; j < jhi; ++j) {
                rep.min_w_y_increment =
                    std::min(rep.min_w_y_increment, s.w(i, j + 1) - s.w(i, j));
            }
        }
    }
    return rep;
}

}  // namespace gamecall
