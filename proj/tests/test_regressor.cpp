#include <cmath>
#include <vector>

#include <doctest.h>

#include "hsmff/errors.hpp"
#include "hsmff/nn.hpp"
#include "hsmff/regressor.hpp"

using namespace hsmff;

namespace {

constexpr double kTs = 1e-4;

RegressorSpec default_spec() {
    RegressorSpec s;
    s.sample_time = kTs;
    return s;
}

} // namespace

TEST_SUITE("regressor") {

TEST_CASE("delta operators vanish on a constant window") {
    const RegressorSpec spec = default_spec();
    const std::vector<double> phi(5, 3.7);
    CHECK(delta_velocity(phi, spec) == 0.0);
    CHECK(delta_acceleration(phi, spec) == 0.0);
}

TEST_CASE("delta velocity is exact on a linear ramp") {
    const RegressorSpec spec = default_spec();
    const double c = 4.25;
    std::vector<double> phi(5);
    for (int i = 0; i < 5; ++i) phi[static_cast<std::size_t>(i)] = c * (2 - i) * kTs;
    CHECK(delta_velocity(phi, spec) == doctest::Approx(c).epsilon(1e-12));
    CHECK(std::abs(delta_acceleration(phi, spec)) < 1e-9);
}

TEST_CASE("delta acceleration is exact on a quadratic") {
    const RegressorSpec spec = default_spec();
    const double a = 37.5;
    std::vector<double> phi(5);
    for (int i = 0; i < 5; ++i) {
        const double t = (2 - i) * kTs;
        phi[static_cast<std::size_t>(i)] = 0.5 * a * t * t;
    }
    CHECK(delta_acceleration(phi, spec) == doctest::Approx(a).epsilon(1e-12));
    CHECK(std::abs(delta_velocity(phi, spec)) < 1e-9);
}

TEST_CASE("an N-sample trace yields N-4 pairs at the defaults") {
    const RegressorSpec spec = default_spec();
    const std::size_t n = 100;
    std::vector<double> y(n), u(n);
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = std::sin(0.01 * static_cast<double>(k));
        u[k] = 0.5 * static_cast<double>(k);
    }
    const RegressorData data = build_regressors(y, u, spec);
    CHECK(data.count == n - 4);
}

TEST_CASE("an all-zero trace yields all-zero pairs") {
    const RegressorSpec spec = default_spec();
    std::vector<double> y(50, 0.0), u(50, 0.0);
    const RegressorData data = build_regressors(y, u, spec);
    for (double v : data.phi) CHECK(v == 0.0);
    for (double v : data.target) CHECK(v == 0.0);
}

TEST_CASE("pairs align the window center with the target input") {
    const RegressorSpec spec = default_spec();
    const std::size_t n = 30;
    std::vector<double> y(n), u(n);
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = static_cast<double>(k);
        u[k] = 1000.0 + static_cast<double>(k);
    }
    const RegressorData data = build_regressors(y, u, spec);
    for (std::size_t i = 0; i < data.count; ++i) {
        const auto phi = data.row(i);
        const double k = phi[static_cast<std::size_t>(spec.center_index())];
        CHECK(data.target[i] == 1000.0 + k);
        CHECK(phi[0] == k + 2.0); // newest sample first
        CHECK(phi[4] == k - 2.0);
    }
}

TEST_CASE("short traces are rejected") {
    const RegressorSpec spec = default_spec();
    std::vector<double> y(7, 0.0), u(7, 0.0);
    CHECK_THROWS_AS(build_regressors(y, u, spec), TraceTooShort);
}

TEST_CASE("floored modulo lands in the unit circle") {
    const double two_pi = 2.0 * M_PI;
    CHECK(mod_two_pi(two_pi + 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(mod_two_pi(-0.1) == doctest::Approx(two_pi - 0.1).epsilon(1e-12));
    CHECK(mod_two_pi(0.0) == 0.0);

    UniformRng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double m = mod_two_pi(rng.next_in(-100.0, 100.0));
        CHECK(m >= 0.0);
        CHECK(m < two_pi);
    }
}

TEST_CASE("input transform of a constant window is pure position") {
    const RegressorSpec spec = default_spec();
    const std::vector<double> phi(5, 2.0 * M_PI + 0.3);
    const auto f = input_transform(phi, spec);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
    CHECK(f[2] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("input transform is invariant to whole-rotation shifts") {
    const RegressorSpec spec = default_spec();
    UniformRng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        // kinematically plausible window
        const double y = rng.next_in(-20.0, 20.0);
        const double v = rng.next_in(-15.0, 15.0);
        const double a = rng.next_in(-80.0, 80.0);
        std::vector<double> phi(5), shifted(5);
        const int n = static_cast<int>(rng.next_below(7)) - 3;
        for (int i = 0; i < 5; ++i) {
            const double t = (2 - i) * kTs;
            phi[static_cast<std::size_t>(i)] = y + v * t + 0.5 * a * t * t;
            shifted[static_cast<std::size_t>(i)] =
                phi[static_cast<std::size_t>(i)] + 2.0 * M_PI * n;
        }
        const auto f0 = input_transform(phi, spec);
        const auto f1 = input_transform(shifted, spec);
        CHECK(std::abs(f0[0] - f1[0]) < 1e-6); // accel: fp noise amplified by 1/(4 Ts^2)
        CHECK(std::abs(f0[1] - f1[1]) < 1e-9);
        CHECK(std::abs(f0[2] - f1[2]) < 1e-9);
    }
}

TEST_CASE("delta operators annihilate exact constant shifts") {
    // dyadic positions and shifts make the additions exact in binary64
    const RegressorSpec spec = default_spec();
    UniformRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> phi(5), shifted(5);
        const double c = static_cast<double>(rng.next_below(1 << 20)) * 0x1.0p-18;
        for (int i = 0; i < 5; ++i) {
            phi[static_cast<std::size_t>(i)] =
                static_cast<double>(rng.next_below(1 << 20)) * 0x1.0p-20;
            shifted[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i)] + c;
        }
        CHECK(delta_velocity(phi, spec) == delta_velocity(shifted, spec));
        CHECK(delta_acceleration(phi, spec) == delta_acceleration(shifted, spec));
    }
}

TEST_CASE("regressor spec validates its orders") {
    RegressorSpec spec = default_spec();
    spec.n_a = -1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

} // TEST_SUITE
