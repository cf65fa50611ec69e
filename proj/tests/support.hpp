#pragma once

// Small helpers shared between the unit suites and the acceptance runner.

#include <cmath>
#include <utility>
#include <vector>

#include "hsmff/nn.hpp"
#include "hsmff/regressor.hpp"
#include "hsmff/trajectory.hpp"

namespace hsmff::testsupport {

// Identification trajectory with varied stroke lengths and speeds, so the
// acceleration windows sample every rotor phase. A plain back-and-forth
// always accelerates at the same positions, which correlates any
// position-periodic effect with the acceleration regressor.
inline ReferenceProfile varied_profile(std::uint64_t seed, int moves, double ts) {
    UniformRng rng(seed);
    ProfileBuilder b(0.0, ts);
    b.hold(0.05);
    for (int i = 0; i < moves; ++i) {
        MotionLimits lim{5.0 + 10.0 * rng.next_unit(), 80.0, 1000.0};
        const double target = (2.0 * rng.next_unit() - 1.0) * 6.0 * M_PI;
        b.move_to(target, lim);
        b.hold(0.05);
    }
    return std::move(b).finish();
}

// y from the profile, u synthesized from the physical coefficients plus an
// optional residual of the position.
inline std::pair<std::vector<double>, std::vector<double>> synth_io(
    const ReferenceProfile& prof, double theta_j, double theta_fv,
    double (*residual)(double) = nullptr) {
    const auto y_span = prof.samples();
    std::vector<double> y(y_span.begin(), y_span.end());
    std::vector<double> u(y.size(), 0.0);
    const double ts = prof.sample_time();
    for (std::size_t k = 2; k + 2 < y.size(); ++k) {
        const double d1 = (y[k + 1] - y[k - 1]) / (2.0 * ts);
        const double d2 = (y[k + 2] - 2.0 * y[k] + y[k - 2]) / (4.0 * ts * ts);
        u[k] = theta_j * d2 + theta_fv * d1;
        if (residual) u[k] += residual(y[k]);
    }
    return {std::move(y), std::move(u)};
}

} // namespace hsmff::testsupport
