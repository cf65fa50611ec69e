#pragma once

#include <cmath>
#include <vector>

namespace hsmff {

// One sinusoidal torque ripple component. Harmonics are integer multiples of
// the rotor tooth count (detent-like), which keeps the torque 2*pi-periodic
// in the mechanical angle.
struct RippleComponent {
    int harmonic = 0;        // integer multiple of rotor_teeth
    double amplitude = 0.0;  // N*m
    double phase = 0.0;      // rad
};

struct ParasiticParams {
    double coulomb_level = 0.0;      // N*m
    double coulomb_smoothing = 0.05; // rad/s, tanh velocity scale
    std::vector<RippleComponent> ripple;

    bool empty() const { return coulomb_level == 0.0 && ripple.empty(); }
    // Throws ConfigError naming the offending field.
    void validate(int rotor_teeth) const;
};

// Physical constants of the hybrid stepper plant. Defaults are plausible
// NEMA23-class values; every one of them is a config input, not a claim.
struct MotorParams {
    double inertia = 5.7e-5;          // J, kg*m^2
    double viscous_friction = 2.0e-3; // f_v, N*m*s/rad
    double motor_constant = 0.1;      // k_m, N*m/A
    int rotor_teeth = 50;             // N
    double inductance = 1.5e-3;       // L, H
    double resistance = 0.55;         // R, ohm
    ParasiticParams parasitic;

    void validate() const;
};

// Continuous-time plant state.
struct MotorState {
    double angle = 0.0;    // rad
    double velocity = 0.0; // rad/s
    double i_a = 0.0;      // A
    double i_b = 0.0;      // A

    bool finite() const {
        return std::isfinite(angle) && std::isfinite(velocity) &&
               std::isfinite(i_a) && std::isfinite(i_b);
    }
};

struct DqPair {
    double d = 0.0;
    double q = 0.0;
};

struct CoilPair {
    double a = 0.0;
    double b = 0.0;
};

// Rotates coil-frame currents into the rotor (dq) frame. The rotation matrix
// is orthogonal, so the current norm is preserved.
DqPair dq_transform(double angle, double i_a, double i_b, int rotor_teeth);

// Rotates dq-frame voltages back into the coil frame; exact inverse of
// dq_transform at the same angle.
CoilPair inverse_dq_transform(double angle, double v_d, double v_q, int rotor_teeth);

// Smooth Coulomb friction plus detent-like torque ripple. 2*pi-periodic in
// angle; tanh instead of sign keeps the ODE Lipschitz for RK4.
double parasitic_torque(double angle, double velocity, const ParasiticParams& p);

// Electromagnetic driving torque produced by the coil currents.
double driving_torque(double angle, double i_a, double i_b, const MotorParams& p);

// Continuous-time state derivative of the plant under constant coil voltages.
MotorState hsm_derivative(const MotorState& s, double v_a, double v_b,
                          const MotorParams& p);

// Classical fourth-order Runge-Kutta update; voltages held constant across
// the step (zero-order hold).
MotorState rk4_step(const MotorState& s, double v_a, double v_b, double dt,
                    const MotorParams& p);

} // namespace hsmff
