#include "hsmff/regressor.hpp"

#include <cmath>

#include "hsmff/errors.hpp"

namespace hsmff {

void RegressorSpec::validate() const {
    if (n_a < 0 || n_b < 0 || n_k < 0)
        throw ConfigError("regressor orders n_a, n_b, n_k must be >= 0");
    if (!(sample_time > 0.0))
        throw ConfigError("regressor.sample_time must be > 0");
}

namespace {

// phi[i] holds y(k + n_k + 1 - i); offset j means y(k + j)
inline std::size_t phi_index(const RegressorSpec& spec, int j) {
    return static_cast<std::size_t>(spec.n_k + 1 - j);
}

void require_delta(const RegressorSpec& spec) {
    if (!spec.supports_delta())
        throw Error("regressor window does not cover y(k-2)..y(k+2); "
                    "need n_k >= 1 and n_a >= n_k + 3");
}

} // namespace

double delta_velocity(std::span<const double> phi, const RegressorSpec& spec) {
    require_delta(spec);
    return (phi[phi_index(spec, 1)] - phi[phi_index(spec, -1)]) / (2.0 * spec.sample_time);
}

double delta_acceleration(std::span<const double> phi, const RegressorSpec& spec) {
    require_delta(spec);
    const double num = phi[phi_index(spec, 2)] - 2.0 * phi[phi_index(spec, 0)] +
                       phi[phi_index(spec, -2)];
    return num / (4.0 * spec.sample_time * spec.sample_time);
}

double mod_two_pi(double y) {
    const double two_pi = 2.0 * M_PI;
    double m = y - two_pi * std::floor(y / two_pi);
    if (m < 0.0) m += two_pi;
    if (m >= two_pi) m -= two_pi;
    return m;
}

std::array<double, 3> input_transform(std::span<const double> phi,
                                      const RegressorSpec& spec) {
    return {delta_acceleration(phi, spec), delta_velocity(phi, spec),
            mod_two_pi(phi[static_cast<std::size_t>(spec.center_index())])};
}

RegressorData build_regressors(const SimTrace& trace, const RegressorSpec& spec) {
    if (trace.sample_time > 0.0 &&
        std::abs(trace.sample_time - spec.sample_time) > 1e-12 * spec.sample_time)
        throw Error("trace and regressor sample times differ");
    return build_regressors(trace.y, trace.u, spec);
}

RegressorData build_regressors(std::span<const double> y, std::span<const double> u,
                               const RegressorSpec& spec) {
    spec.validate();
    if (y.size() != u.size()) throw Error("y/u length mismatch");

    const auto n = static_cast<std::ptrdiff_t>(y.size());
    // all window indices must fall inside [0, n)
    std::ptrdiff_t k_min = spec.n_a - spec.n_k - 1;
    if (spec.n_b > 1) k_min = std::max<std::ptrdiff_t>(k_min, spec.n_b - 1);
    k_min = std::max<std::ptrdiff_t>(k_min, 0);
    const std::ptrdiff_t k_max = n - spec.n_k - 2;

    if (n <= spec.n_a + spec.n_k + 2 || k_max < k_min)
        throw TraceTooShort("need more than " +
                            std::to_string(spec.n_a + spec.n_k + 2) + " samples, got " +
                            std::to_string(n));

    RegressorData data;
    data.spec = spec;
    data.count = static_cast<std::size_t>(k_max - k_min + 1);
    const auto len = static_cast<std::size_t>(spec.length());
    data.phi.resize(data.count * len);
    data.target.resize(data.count);

    for (std::ptrdiff_t k = k_min; k <= k_max; ++k) {
        double* row = data.phi.data() + static_cast<std::size_t>(k - k_min) * len;
        for (int i = 0; i <= spec.n_a; ++i)
            row[i] = y[static_cast<std::size_t>(k + spec.n_k + 1 - i)];
        for (int i = 0; i < spec.input_entries(); ++i)
            row[spec.position_entries() + i] = u[static_cast<std::size_t>(k - 1 - i)];
        data.target[static_cast<std::size_t>(k - k_min)] = u[static_cast<std::size_t>(k)];
    }
    return data;
}

} // namespace hsmff
