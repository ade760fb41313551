#include <doctest.h>

#include <cmath>

#include "gamecall/model.hpp"
#include "gamecall/rng.hpp"

using namespace gamecall;

namespace {
ModelParams desk() { return ModelParams::validate(0.08, 0.05, 0.3, 1.0, 0.1); }
}  // namespace

TEST_CASE("validate_params derives k, ratio and the regime flags") {
    const ModelParams m = desk();
    CHECK(m.k == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(m.ratio == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(m.assumption_ratio_ok);
    CHECK(m.assumption_ratio_strict);
    CHECK_FALSE(m.strong_r);

    const ModelParams s = ModelParams::validate(0.05, 0.05, 0.3, 1.0, 0.1);
    CHECK(s.k == doctest::Approx(-0.02).epsilon(1e-12));
    // (d0/s^2)(d0+s^2)/2 = 0.03888..., upper bound 0.07
    CHECK(s.strong_r);
}

TEST_CASE("validate_params rejects non-positive inputs and k = 0") {
    CHECK_THROWS_AS(ModelParams::validate(-0.05, 0.05, 0.3, 1.0, 0.1), NonPositiveParameter);
    CHECK_THROWS_AS(ModelParams::validate(0.05, 0.0, 0.3, 1.0, 0.1), NonPositiveParameter);
    CHECK_THROWS_AS(ModelParams::validate(0.05, 0.05, 0.3, 1.0, 0.0), NonPositiveParameter);
    // r = sigma^2/2 + delta0/2 exactly
    CHECK_THROWS_AS(ModelParams::validate(0.09, 0.09, 0.3, 1.0, 0.1), DegenerateK);
}

TEST_CASE("payoffs: call pair with constant gap") {
    const ModelParams m = desk();
    CHECK(m.g1(m.strike) == 0.0);
    CHECK(m.g1(2.0 * m.strike) == doctest::Approx(m.strike));
    CHECK(m.g2(0.0) == doctest::Approx(m.penalty));
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double a = 3.0 * rng.uniform01(), b = 3.0 * rng.uniform01();
        CHECK(m.g2(a) - m.g1(a) == doctest::Approx(m.penalty));
        CHECK(std::fabs(m.g1(a) - m.g1(b)) <= std::fabs(a - b) + 1e-15);  // 1-Lipschitz
        CHECK(std::fabs(m.g2(a) - m.g2(b)) <= std::fabs(a - b) + 1e-15);
    }
}

TEST_CASE("transform: fixed points and round trip") {
    const ModelParams m = desk();
    CHECK(from_z({0.0, 0.5}, m).x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(to_z({1.0, 0.5}, m).z == doctest::Approx(0.0).epsilon(1e-14));

    const StatePoint p = from_z({1.3, 0.2}, m);
    CHECK(to_z(p, m).z == doctest::Approx(1.3).epsilon(1e-12));

    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const double z = 10.0 * rng.uniform01();
        const double y = 0.01 + 0.98 * rng.uniform01();
        const StatePoint q = from_z({z, y}, m);
        const double back = to_z(q, m).z;
        CHECK(std::fabs(back - z) <= 1e-12 * (1.0 + std::fabs(z)));
    }
    CHECK_THROWS_AS(to_z({1.0, 0.0}, m), SingularTransform);
    CHECK_THROWS_AS(to_z({1.0, 1.0}, m), SingularTransform);
}

TEST_CASE("F is increasing in z, decreasing in y; yF non-increasing when ratio >= 1") {
    const ModelParams m = desk();
    for (int i = 0; i < 40; ++i) {
        const double z = -4.0 + 8.0 * i / 39.0;
        for (int j = 1; j < 40; ++j) {
            const double y = j / 40.0;
            CHECK(transform_f(z + 0.05, y, m) > transform_f(z, y, m));
            if (j < 39) {
                const double y2 = (j + 1) / 40.0;
                CHECK(transform_f(z, y2, m) < transform_f(z, y, m));
                CHECK(y2 * transform_f(z, y2, m) <= y * transform_f(z, y, m) + 1e-12);
            }
        }
    }
}

TEST_CASE("y_K curve: defining identity, limits, midpoint") {
    const ModelParams m = desk();
    for (double z : {-2.0, 0.0, 3.0}) {
        const double yk = y_k_curve(z, m);
        CHECK(transform_f(z, yk, m) == doctest::Approx(m.strike).epsilon(1e-10));
    }
    CHECK(y_k_curve(-50.0, m) < 1e-10);
    CHECK(y_k_curve(50.0, m) > 1.0 - 1e-10);
    CHECK(y_k_curve(0.0, m) == doctest::Approx(0.5).epsilon(1e-14));  // K = 1
    // strictly increasing
    double prev = y_k_curve(-6.0, m);
    for (int i = 1; i <= 60; ++i) {
        const double cur = y_k_curve(-6.0 + 0.2 * i, m);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("obstacles meet the payoffs on the y_K curve") {
    const ModelParams m = desk();
    for (double z : {-1.0, 0.4, 2.2}) {
        const double yk = y_k_curve(z, m);
        CHECK(obstacle(1, {z, yk}, m) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(obstacle(2, {z, yk}, m) == doctest::Approx(m.penalty).epsilon(1e-10));
        CHECK(obstacle(2, {z, 0.3}, m) - obstacle(1, {z, 0.3}, m) ==
              doctest::Approx(m.penalty));
    }
    CHECK_THROWS_AS(obstacle(1, {0.0, 1.0}, m), SingularTransform);
}
