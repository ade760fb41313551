#include "gamecall/model.hpp"

#include <cmath>
#include <string>

namespace gamecall {

namespace {
void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw NonPositiveParameter(std::string(name) + " must be strictly positive, got " +
                                   std::to_string(v));
    }
}
}  // namespace

ModelParams ModelParams::validate(double r, double delta0, double sigma, double strike,
                                  double penalty) {
    require_positive(r, "r");
    require_positive(delta0, "delta0");
    require_positive(sigma, "sigma");
    require_positive(strike, "strike");
    require_positive(penalty, "penalty");

    ModelParams m;
    m.r = r;
    m.delta0 = delta0;
    m.sigma = sigma;
    m.strike = strike;
    m.penalty = penalty;
    m.k = r - 0.5 * sigma * sigma - 0.5 * delta0;
    if (std::fabs(m.k) < 1e-12) {
        throw DegenerateK("k = r - sigma^2/2 - delta0/2 is numerically zero (" +
                          std::to_string(m.k) + "); this degenerate case is unsupported");
    }
    m.ratio = sigma * sigma / delta0;
    m.assumption_ratio_ok = m.ratio >= 1.0;
    m.assumption_ratio_strict = m.ratio > 1.0;
    const double hi = 0.5 * (delta0 + sigma * sigma);
    const double lo = (delta0 / (sigma * sigma)) * hi;
    m.strong_r = (lo < r) && (r < hi);
    return m;
}

TransformedPoint to_z(const StatePoint& p, const ModelParams& m) {
    if (!(p.y > 0.0 && p.y < 1.0)) {
        throw SingularTransform("to_z: y must be in (0,1), got " + std::to_string(p.y));
    }
    if (!(p.x > 0.0)) {
        throw SingularTransform("to_z: x must be positive, got " + std::to_string(p.x));
    }
    TransformedPoint q;
    q.y = p.y;
    q.z = std::log(p.x) + m.ratio * std::log(p.y / (1.0 - p.y));
    return q;
}

double log_transform_f(double z, double y, const ModelParams& m) {
    if (!(y > 0.0 && y < 1.0)) {
        throw SingularTransform("F(z,y): y must be in (0,1), got " + std::to_string(y));
    }
    return z + m.ratio * std::log((1.0 - y) / y);
}

double transform_f(double z, double y, const ModelParams& m) {
    // exp() saturates gracefully; cap the exponent so downstream arithmetic
    // stays in normal doubles even for extreme grid corners.
    double lf = log_transform_f(z, y, m);
    if (lf > 700.0) lf = 700.0;
    return std::exp(lf);
}

StatePoint from_z(const TransformedPoint& q, const ModelParams& m) {
    StatePoint p;
    p.y = q.y;
    p.x = transform_f(q.z, q.y, m);
    return p;
}

double y_k_curve(double z, const ModelParams& m) {
    // y_K(z) = e^{z/rho} / (K^{1/rho} + e^{z/rho}) = logistic((z - ln K)/rho)
    const double t = (z - std::log(m.strike)) / m.ratio;
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double obstacle(int which, const TransformedPoint& q, const ModelParams& m) {
    const double x = transform_f(q.z, q.y, m);
    return which == 1 ? m.g1(x) : m.g2(x);
}

}  // namespace gamecall
