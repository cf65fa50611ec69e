#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hsmff/sim.hpp"

namespace hsmff {

// Window layout for the inverse-dynamics regressor
//   phi(k) = [y(k+n_k+1), ..., y(k+n_k-n_a+1), u(k-1), ..., u(k-n_b+1)].
// Defaults (n_k=1, n_a=4, n_b=0) give phi(k) = [y(k+2), ..., y(k-2)].
struct RegressorSpec {
    int n_a = 4;
    int n_b = 0;
    int n_k = 1;
    double sample_time = 1e-4;

    int position_entries() const { return n_a + 1; }
    int input_entries() const { return n_b > 1 ? n_b - 1 : 0; }
    int length() const { return position_entries() + input_entries(); }
    // index of y(k) within phi
    int center_index() const { return n_k + 1; }

    void validate() const;
    // true when the window reaches y(k+1)..y(k-2), as the central-difference
    // velocity/acceleration features require
    bool supports_delta() const {
        return n_k >= 1 && n_k - n_a + 1 <= -2;
    }
};

// Central-difference velocity over the window: (y(k+1) - y(k-1)) / (2 T_s).
double delta_velocity(std::span<const double> phi, const RegressorSpec& spec);

// Central-difference acceleration: (y(k+2) - 2 y(k) + y(k-2)) / (4 T_s^2).
double delta_acceleration(std::span<const double> phi, const RegressorSpec& spec);

// Floored modulo: result in [0, 2*pi) for any finite argument.
double mod_two_pi(double y);

// Rotation-invariant NN features [delta2 y(k), delta y(k), mod(y(k), 2*pi)].
std::array<double, 3> input_transform(std::span<const double> phi,
                                      const RegressorSpec& spec);

// Regressor/target pairs extracted from a trace; boundary samples without a
// full window are dropped. Rows are stored contiguously.
struct RegressorData {
    RegressorSpec spec;
    std::size_t count = 0;
    std::vector<double> phi;     // count x spec.length(), row-major
    std::vector<double> target;  // u at the window's center time

    std::span<const double> row(std::size_t i) const {
        const auto len = static_cast<std::size_t>(spec.length());
        return {phi.data() + i * len, len};
    }
};

// Throws TraceTooShort when no full window fits.
RegressorData build_regressors(const SimTrace& trace, const RegressorSpec& spec);

// Same extraction from bare sample arrays (y, u); used for synthetic data.
RegressorData build_regressors(std::span<const double> y, std::span<const double> u,
                               const RegressorSpec& spec);

} // namespace hsmff
