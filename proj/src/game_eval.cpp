#include "gamecall/game_eval.hpp"

#include <algorithm>
#include <cmath>

namespace gamecall {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimal path walker in (z, y); x is materialized on demand. Paths that
// clamp to a Y endpoint continue as geometric Brownian motion there.
struct Walker {
    const ModelParams& m;
    double dt, sqdt, vol_y;
    Rng rng;
    double t = 0.0, y = 0.0, z = 0.0;
    bool absorbed = false;
    double x_abs = 0.0;
    double last_dw = 0.0;

    Walker(const ModelParams& mm, double z0, double y0, double dt_, Rng r)
        : m(mm), dt(dt_), sqdt(std::sqrt(dt_)), vol_y(mm.delta0 / mm.sigma), rng(r) {
        z = z0;
        y = y0;
    }

    double x() const { return absorbed ? x_abs : transform_f(z, y, m); }

    void step() {
        const double dw = sqdt * rng.normal();
        last_dw = dw;
        if (!absorbed) {
            double ynew = y - vol_y * y * (1.0 - y) * dw;
            if (ynew <= 0.0 || ynew >= 1.0) {
                x_abs = transform_f(z, y, m) *
                        std::exp((m.r - m.delta0 * y - 0.5 * m.sigma * m.sigma) * dt +
                                 m.sigma * dw);
                y = ynew <= 0.0 ? 0.0 : 1.0;
                absorbed = true;
            } else {
                y = ynew;
            }
        } else {
            x_abs *= std::exp((m.r - m.delta0 * y - 0.5 * m.sigma * m.sigma) * dt +
                              m.sigma * dw);
        }
        t += dt;
        z += m.k * dt;
    }
};

struct Accumulator {
    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    void add(double v) {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        const double mu = mean();
        const double var = std::max(0.0, (sum2 - n * mu * mu) / (n - 1));
        return std::sqrt(var / n);
    }
};

struct StrategyTrack {
    StrategySpec spec;
    bool buyer = true;
    double hit = kInf;  // resolved hitting time; 0 for immediate
    bool resolved = false;

    void reset() {
        if (spec.kind == StrategyKind::immediate) {
            hit = 0.0;
            resolved = true;
        } else if (spec.kind == StrategyKind::never) {
            hit = kInf;
            resolved = true;
        } else {
            hit = kInf;
            resolved = false;
        }
    }
    bool triggers(double y, double c1, double c2, double yk) const {
        if (buyer) {
            return !std::isnan(c1) && y <= c1 + spec.shift;
        }
        return !std::isnan(c2) && y >= c2 + spec.shift && y <= yk;
    }
};

double pair_payoff(const ModelParams& m, double tau, double gamma, double x_tau,
                   double x_gamma) {
    if (!std::isfinite(tau) && !std::isfinite(gamma)) return 0.0;
    if (tau <= gamma) return std::exp(-m.r * tau) * m.g1(x_tau);
    return std::exp(-m.r * gamma) * m.g2(x_gamma);
}

// Shared CRN engine: runs the batch once, resolving all strategy tracks per
// path and handing (times, states) to the payoff composer.
struct PathOutcome {
    std::vector<double> hit_time;  // per track
    std::vector<double> hit_x;     // x at the hitting time (NaN if none)
};

template <typename Consume>
void run_batch(const ModelParams& m, const StatePoint& start, const FreeBoundaries& fb,
               const SimConfig& cfg, std::vector<StrategyTrack>& tracks, Consume&& consume) {
    cfg.check();
    const double z0 = to_z(start, m).z;
    const long nsteps = cfg.n_steps();
    Eigen::VectorXd times(nsteps + 1);
    for (long n = 0; n <= nsteps; ++n) times[n] = std::min(n * cfg.dt, cfg.horizon);
    const BoundaryOnPath bp = boundaries_along(m, fb, z0, times);

    PathOutcome out;
    out.hit_time.resize(tracks.size());
    out.hit_x.resize(tracks.size());

    for (long p = 0; p < cfg.n_paths; ++p) {
        Walker w(m, z0, start.y, cfg.dt, Rng::substream(cfg.seed, static_cast<std::uint64_t>(p)));
        long unresolved = 0;
        for (auto& tr : tracks) {
            tr.reset();
            if (!tr.resolved) ++unresolved;
        }
        for (size_t s = 0; s < tracks.size(); ++s) {
            out.hit_time[s] = tracks[s].hit;
            out.hit_x[s] = std::numeric_limits<double>::quiet_NaN();
            if (tracks[s].spec.kind == StrategyKind::immediate) out.hit_x[s] = start.x;
        }
        for (long n = 0; n <= nsteps && unresolved > 0; ++n) {
            if (n > 0) w.step();
            const double yv = n == 0 ? start.y : w.y;
            for (size_t s = 0; s < tracks.size(); ++s) {
                auto& tr = tracks[s];
                if (tr.resolved) continue;
                if (tr.triggers(yv, bp.c1[n], bp.c2[n], bp.yk[n])) {
                    tr.resolved = true;
                    out.hit_time[s] = times[n];
                    out.hit_x[s] = n == 0 ? start.x : w.x();
                    --unresolved;
                }
            }
        }
        consume(out);
    }
}

}  // namespace

GameEstimate evaluate_pair(const ModelParams& m, const StatePoint& start,
                           const StrategySpec& tau, const StrategySpec& gamma,
                           const FreeBoundaries& fb, const SimConfig& cfg) {
    GameEstimate est;
    est.n_paths = cfg.n_paths;

    // Degenerate pairs resolve without simulation and with zero variance.
    const bool tau_fixed =
        tau.kind == StrategyKind::immediate || tau.kind == StrategyKind::never;
    const bool gamma_fixed =
        gamma.kind == StrategyKind::immediate || gamma.kind == StrategyKind::never;
    if (tau_fixed && gamma_fixed) {
        const double tt = tau.kind == StrategyKind::immediate ? 0.0 : kInf;
        const double gt = gamma.kind == StrategyKind::immediate ? 0.0 : kInf;
        est.mean = pair_payoff(m, tt, gt, start.x, start.x);
        est.std_error = 0.0;
        est.truncation_bias_bound = 0.0;
        return est;
    }

    const double z0 = to_z(start, m).z;
    est.truncation_bias_bound =
        std::exp(-m.r * cfg.horizon) *
        (continuation_x_bound(m, fb, z0, cfg.horizon) + m.penalty);

    std::vector<StrategyTrack> tracks(2);
    tracks[0].spec = tau;
    tracks[0].buyer = true;
    tracks[1].spec = gamma;
    tracks[1].buyer = false;

    Accumulator acc;
    long truncated = 0;
    run_batch(m, start, fb, cfg, tracks, [&](const PathOutcome& o) {
        if (!std::isfinite(o.hit_time[0]) && !std::isfinite(o.hit_time[1])) ++truncated;
        acc.add(pair_payoff(m, o.hit_time[0], o.hit_time[1], o.hit_x[0], o.hit_x[1]));
    });
    est.mean = acc.mean();
    est.std_error = acc.se();
    est.fraction_truncated = static_cast<double>(truncated) / cfg.n_paths;
    return est;
}

SaddleReport saddle_check(const ModelParams& m, const StatePoint& start,
                          const FreeBoundaries& fb, const std::vector<double>& shifts,
                          const SimConfig& cfg) {
    SaddleReport rep;
    rep.horizon = cfg.horizon;
    if (m.k > 0.0) {
        rep.in_theorem_scope = m.assumption_ratio_strict;
        rep.scope_note = rep.in_theorem_scope
                             ? "k>0, sigma^2/delta0>1: saddle point applies"
                             : "k>0 but sigma^2/delta0<=1: outside theorem scope";
    } else {
        rep.in_theorem_scope = m.strong_r && m.assumption_ratio_strict;
        rep.scope_note = rep.in_theorem_scope
                             ? "k<0 under the strong rate bound: saddle point applies"
                             : "k<0 without the strong rate bound: outside theorem scope";
    }

    const double z0 = to_z(start, m).z;
    rep.truncation_bias_bound =
        std::exp(-m.r * cfg.horizon) *
        (continuation_x_bound(m, fb, z0, cfg.horizon) + m.penalty);

    // Track 0/1: base pair. Then per shift a buyer deviation and a seller one.
    std::vector<StrategyTrack> tracks;
    tracks.push_back({StrategySpec::boundary(), true});
    tracks.push_back({StrategySpec::boundary(), false});
    for (double sft : shifts) {
        tracks.push_back({StrategySpec::shifted(sft), true});
        tracks.push_back({StrategySpec::shifted(sft), false});
    }

    Accumulator base_acc;
    std::vector<Accumulator> dev_acc(2 * shifts.size());
    std::vector<Accumulator> diff_acc(2 * shifts.size());
    long truncated = 0;

    run_batch(m, start, fb, cfg, tracks, [&](const PathOutcome& o) {
        const double base =
            pair_payoff(m, o.hit_time[0], o.hit_time[1], o.hit_x[0], o.hit_x[1]);
        base_acc.add(base);
        if (!std::isfinite(o.hit_time[0]) && !std::isfinite(o.hit_time[1])) ++truncated;
        for (size_t si = 0; si < shifts.size(); ++si) {
            const size_t bi = 2 + 2 * si, gi = 3 + 2 * si;
            // buyer deviates, seller keeps gamma*
            const double mb =
                pair_payoff(m, o.hit_time[bi], o.hit_time[1], o.hit_x[bi], o.hit_x[1]);
            dev_acc[2 * si].add(mb);
            diff_acc[2 * si].add(mb - base);
            // seller deviates, buyer keeps tau*
            const double ms =
                pair_payoff(m, o.hit_time[0], o.hit_time[gi], o.hit_x[0], o.hit_x[gi]);
            dev_acc[2 * si + 1].add(ms);
            diff_acc[2 * si + 1].add(ms - base);
        }
    });

    rep.base = base_acc.mean();
    rep.base_se = base_acc.se();
    rep.fraction_truncated = static_cast<double>(truncated) / cfg.n_paths;

    for (size_t si = 0; si < shifts.size(); ++si) {
        for (int side = 0; side < 2; ++side) {
            DeviationResult d;
            d.buyer_side = side == 0;
            d.shift = shifts[si];
            d.estimate = dev_acc[2 * si + side].mean();
            d.diff_mean = diff_acc[2 * si + side].mean();
            d.diff_se = diff_acc[2 * si + side].se();
            d.slack = 3.0 * d.diff_se + rep.truncation_bias_bound;
            // buyer must not gain, seller must not save
            d.pass = d.buyer_side ? (d.diff_mean <= d.slack) : (d.diff_mean >= -d.slack);
            rep.all_pass = rep.all_pass && d.pass;
            rep.deviations.push_back(d);
        }
    }
    return rep;
}

MartingaleReport martingale_check(const ModelParams& m, const StatePoint& start,
                                  const ValueSurface& surface, const FreeBoundaries& fb,
                                  const std::vector<double>& checkpoints,
                                  const SimConfig& cfg) {
    MartingaleReport rep;
    rep.v_ref = value_at(surface, start.x, start.y);
    rep.interp_allowance = 1e-2 * m.strike;

    std::vector<double> cps = checkpoints;
    std::sort(cps.begin(), cps.end());
    SimConfig local = cfg;
    local.horizon = cps.empty() ? cfg.horizon : cps.back();

    const double z0 = to_z(start, m).z;
    const long nsteps = local.n_steps();
    Eigen::VectorXd times(nsteps + 1);
    for (long n = 0; n <= nsteps; ++n) times[n] = std::min(n * local.dt, local.horizon);
    const BoundaryOnPath bp = boundaries_along(m, fb, z0, times);

    std::vector<long> cp_steps;
    for (double t : cps)
        cp_steps.push_back(std::min<long>(nsteps, static_cast<long>(std::round(t / local.dt))));

    struct Row {
        Accumulator sup, sub, mart;
        long clamped = 0;
    };
    std::vector<Row> rows(cps.size());

    for (long p = 0; p < local.n_paths; ++p) {
        Walker w(m, z0, start.y, local.dt, Rng::substream(local.seed, static_cast<std::uint64_t>(p)));
        double tau = kInf, gam = kInf;
        double x_tau = 0.0, x_gam = 0.0;
        size_t next_cp = 0;
        for (long n = 0; n <= nsteps && next_cp < cp_steps.size(); ++n) {
            if (n > 0) w.step();
            const double yv = n == 0 ? start.y : w.y;
            const double xv = n == 0 ? start.x : w.x();
            if (!std::isfinite(tau) && !std::isnan(bp.c1[n]) && yv <= bp.c1[n]) {
                tau = times[n];
                x_tau = xv;
            }
            if (!std::isfinite(gam) && !std::isnan(bp.c2[n]) && yv >= bp.c2[n] &&
                yv <= bp.yk[n]) {
                gam = times[n];
                x_gam = xv;
            }
            while (next_cp < cp_steps.size() && n == cp_steps[next_cp]) {
                Row& row = rows[next_cp];
                const double tc = times[n];
                double v_here = std::numeric_limits<double>::quiet_NaN();
                auto value_now = [&]() {
                    if (std::isnan(v_here)) {
                        v_here = value_at_yclamped(surface, xv, yv);
                        if (std::isnan(v_here)) {
                            // off the solved rectangle in z: deep stopping payoff
                            v_here = yv <= y_k_curve(w.z, m) ? m.g1(xv) : m.g2(xv);
                            ++row.clamped;
                        }
                    }
                    return v_here;
                };
                // stopped at gamma*
                row.sup.add(std::isfinite(gam) ? std::exp(-m.r * gam) * m.g2(x_gam)
                                               : std::exp(-m.r * tc) * value_now());
                // stopped at tau*
                row.sub.add(std::isfinite(tau) ? std::exp(-m.r * tau) * m.g1(x_tau)
                                               : std::exp(-m.r * tc) * value_now());
                // stopped at both
                if (std::isfinite(tau) && tau <= gam) {
                    row.mart.add(std::exp(-m.r * tau) * m.g1(x_tau));
                } else if (std::isfinite(gam)) {
                    row.mart.add(std::exp(-m.r * gam) * m.g2(x_gam));
                } else {
                    row.mart.add(std::exp(-m.r * tc) * value_now());
                }
                ++next_cp;
            }
        }
    }

    for (size_t c = 0; c < cps.size(); ++c) {
        MartingaleCheckpoint cp;
        cp.t = cps[c];
        cp.sup_mean = rows[c].sup.mean();
        cp.sup_se = rows[c].sup.se();
        cp.sub_mean = rows[c].sub.mean();
        cp.sub_se = rows[c].sub.se();
        cp.mart_mean = rows[c].mart.mean();
        cp.mart_se = rows[c].mart.se();
        cp.clamped_evals = rows[c].clamped;
        const bool sup_ok = cp.sup_mean <= rep.v_ref + 3.0 * cp.sup_se + rep.interp_allowance;
        const bool sub_ok = cp.sub_mean >= rep.v_ref - 3.0 * cp.sub_se - rep.interp_allowance;
        const bool mart_ok =
            std::fabs(cp.mart_mean - rep.v_ref) <= 3.0 * cp.mart_se + rep.interp_allowance;
        rep.pass = rep.pass && sup_ok && sub_ok && mart_ok;
        rep.checkpoints.push_back(cp);
    }
    return rep;
}

RegularityReport regularity_probe(const ModelParams& m, const FreeBoundaries& fb,
                                  int n_points, const SimConfig& cfg) {
    RegularityReport rep;
    rep.z_K = fb.z_K;
    rep.exceptional_point_flagged = m.k > 0.0 && !fb.s2_empty;

    const double dzgrid = fb.z[1] - fb.z[0];
    const double excl = 10.0 * dzgrid;

    auto collect = [&](const Eigen::VectorXd& curve, bool on_c1) {
        std::vector<int> idx;
        for (int i = 0; i < curve.size(); ++i) {
            if (!std::isfinite(curve[i])) continue;
            if (on_c1 && (curve[i] <= fb.y[1] || curve[i] >= fb.y[fb.y.size() - 2])) continue;
            if (!on_c1 && rep.exceptional_point_flagged &&
                std::fabs(fb.z[i] - fb.z_K) <= excl)
                continue;  // flagged neighborhood of (z_K, yK(z_K))
            idx.push_back(i);
        }
        if (idx.empty()) return;
        // interquartile range of the present slices, evenly sampled
        const size_t lo = idx.size() / 4, hi = idx.size() - 1 - idx.size() / 4;
        for (int pnum = 0; pnum < n_points; ++pnum) {
            const size_t pick = lo + (hi - lo) * pnum / std::max(1, n_points - 1);
            const int i = idx[pick];
            RegularityPoint pt;
            pt.z0 = fb.z[i];
            pt.y0 = curve[i];
            pt.on_c1 = on_c1;

            long exceed_small = 0, exceed_large = 0;
            const long nsteps = cfg.n_steps();
            for (long p = 0; p < cfg.n_paths; ++p) {
                Walker w(m, pt.z0, pt.y0, cfg.dt,
                         Rng::substream(cfg.seed + (on_c1 ? 0x51u : 0x52u) + 977u * i,
                                        static_cast<std::uint64_t>(p)));
                double entry = kInf;
                for (long n = 0; n <= nsteps; ++n) {
                    if (n > 0) w.step();
                    const double c1 = interp_curve(fb.z, fb.c1, w.z);
                    const double c2 = interp_curve(fb.z, fb.c2, w.z);
                    const double yk = y_k_curve(w.z, m);
                    const bool inside =
                        on_c1 ? (!std::isnan(c1) && w.y < c1)
                              : (!std::isnan(c2) && w.y > c2 && w.y < yk);
                    if (inside) {
                        entry = n * cfg.dt;
                        break;
                    }
                }
                if (!(entry <= 1e-3)) ++exceed_small;
                if (!(entry <= 1e-2)) ++exceed_large;
            }
            pt.frac_exceed_small = static_cast<double>(exceed_small) / cfg.n_paths;
            pt.frac_exceed_large = static_cast<double>(exceed_large) / cfg.n_paths;
            rep.pass = rep.pass && pt.frac_exceed_large <= 0.05;
            rep.points.push_back(pt);
        }
    };

    collect(fb.c1, true);
    if (!fb.s2_empty) collect(fb.c2, false);
    return rep;
}

}  // namespace gamecall
