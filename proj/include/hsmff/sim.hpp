#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hsmff/motor.hpp"
#include "hsmff/trajectory.hpp"

namespace hsmff {

struct ControllerGains {
    double current_kp = 6.6;   // V/A
    double current_ki = 4.0e4; // V/(A*s); 0 disables integral action
    double position_kp = 5.0;  // N*m/rad, pure gain
    double sample_time = 1e-4; // T_s, s

    void validate() const;
};

// Backward-Euler integral states of the d and q current controllers.
struct CurrentLoopState {
    double integral_d = 0.0;
    double integral_q = 0.0;
};

struct DqVoltages {
    double v_d = 0.0;
    double v_q = 0.0;
};

// One discrete step of the dq current controllers: the d channel regulates
// i_d to zero, the q channel tracks i_q_ref. Pure proportional when
// current_ki == 0.
DqVoltages current_control_step(double i_d, double i_q, double i_q_ref,
                                CurrentLoopState& state, const ControllerGains& g);

// Sampled closed-loop record, one row per controller period.
struct SimTrace {
    double sample_time = 0.0;
    std::vector<double> t;
    std::vector<double> y_star;
    std::vector<double> y;
    std::vector<double> u;
    std::vector<double> u_ff;
    std::vector<double> u_fb;
    std::vector<double> i_d;
    std::vector<double> i_q;
    std::vector<double> i_a;
    std::vector<double> i_b;
    std::vector<double> v_d;
    std::vector<double> v_q;

    std::size_t size() const { return t.size(); }
    void reserve(std::size_t n);

    // Fixed-schema CSV: t,y_star,y,u,u_ff,u_fb,i_d,i_q,i_a,i_b,v_d,v_q with
    // 17-significant-digit values (binary64 text round-trip is lossless).
    void to_csv(const std::string& path) const;
    static SimTrace from_csv(const std::string& path);
};

// Per-sample u_ff supplier used by the simulator; implemented by the
// feedforward runtime. Called once per controller period, in order.
class FeedforwardSource {
public:
    virtual ~FeedforwardSource() = default;
    virtual double feedforward(std::size_t k) = 0;
};

// Simulates the cascaded position/current control loop of Fig-2-style FOC:
// per period, position feedback plus optional feedforward form the torque
// command u, the current loop tracks i_q* = u/k_m (i_d* = 0), and the plant
// is integrated with `substeps` RK4 steps under held coil voltages. The
// plant starts at rest at the profile's first sample.
// Throws NonFiniteState if the state diverges.
SimTrace closed_loop_simulate(const ReferenceProfile& profile, FeedforwardSource* ff,
                              const MotorParams& params, const ControllerGains& gains,
                              int substeps);

} // namespace hsmff
