#include "hsmff/motor.hpp"

#include "hsmff/errors.hpp"

namespace hsmff {

void ParasiticParams::validate(int rotor_teeth) const {
    if (coulomb_level < 0.0)
        throw ConfigError("parasitic.coulomb_level must be >= 0");
    if (!(coulomb_smoothing > 0.0))
        throw ConfigError("parasitic.coulomb_smoothing must be > 0");
    for (const auto& r : ripple) {
        if (r.amplitude < 0.0)
            throw ConfigError("parasitic.ripple amplitude must be >= 0");
        if (r.harmonic <= 0 || r.harmonic % rotor_teeth != 0)
            throw ConfigError(
                "parasitic.ripple harmonic must be a positive integer multiple "
                "of motor.rotor_teeth");
    }
}

void MotorParams::validate() const {
    if (!(inertia > 0.0))
        throw ConfigError("motor.inertia must be > 0");
    if (!(viscous_friction > 0.0))
        throw ConfigError("motor.viscous_friction must be > 0");
    if (!(motor_constant > 0.0))
        throw ConfigError("motor.motor_constant must be > 0");
    if (rotor_teeth < 1)
        throw ConfigError("motor.rotor_teeth must be >= 1");
    if (!(inductance > 0.0))
        throw ConfigError("motor.inductance must be > 0");
    if (!(resistance > 0.0))
        throw ConfigError("motor.resistance must be > 0");
    parasitic.validate(rotor_teeth);
}

DqPair dq_transform(double angle, double i_a, double i_b, int rotor_teeth) {
    const double e = static_cast<double>(rotor_teeth) * angle;
    const double c = std::cos(e);
    const double s = std::sin(e);
    return {c * i_a + s * i_b, -s * i_a + c * i_b};
}

CoilPair inverse_dq_transform(double angle, double v_d, double v_q, int rotor_teeth) {
    const double e = static_cast<double>(rotor_teeth) * angle;
    const double c = std::cos(e);
    const double s = std::sin(e);
    return {c * v_d - s * v_q, s * v_d + c * v_q};
}

double parasitic_torque(double angle, double velocity, const ParasiticParams& p) {
    double torque = -p.coulomb_level * std::tanh(velocity / p.coulomb_smoothing);
    for (const auto& r : p.ripple)
        torque += r.amplitude * std::sin(static_cast<double>(r.harmonic) * angle + r.phase);
    return torque;
}

double driving_torque(double angle, double i_a, double i_b, const MotorParams& p) {
    const double e = static_cast<double>(p.rotor_teeth) * angle;
    return p.motor_constant * (-i_a * std::sin(e) + i_b * std::cos(e));
}

MotorState hsm_derivative(const MotorState& s, double v_a, double v_b,
                          const MotorParams& p) {
    const double e = static_cast<double>(p.rotor_teeth) * s.angle;
    const double sin_e = std::sin(e);
    const double cos_e = std::cos(e);

    const double torque = p.motor_constant * (-s.i_a * sin_e + s.i_b * cos_e) +
                          parasitic_torque(s.angle, s.velocity, p.parasitic);

    MotorState d;
    d.angle = s.velocity;
    d.velocity = (torque - p.viscous_friction * s.velocity) / p.inertia;
    // back-EMF terms oppose the coil drive
    d.i_a = (v_a - p.resistance * s.i_a + p.motor_constant * s.velocity * sin_e) / p.inductance;
    d.i_b = (v_b - p.resistance * s.i_b - p.motor_constant * s.velocity * cos_e) / p.inductance;
    return d;
}

namespace {

MotorState axpy(const MotorState& s, double h, const MotorState& k) {
    return {s.angle + h * k.angle, s.velocity + h * k.velocity,
            s.i_a + h * k.i_a, s.i_b + h * k.i_b};
}

} // namespace

MotorState rk4_step(const MotorState& s, double v_a, double v_b, double dt,
                    const MotorParams& p) {
    const MotorState k1 = hsm_derivative(s, v_a, v_b, p);
    const MotorState k2 = hsm_derivative(axpy(s, 0.5 * dt, k1), v_a, v_b, p);
    const MotorState k3 = hsm_derivative(axpy(s, 0.5 * dt, k2), v_a, v_b, p);
    const MotorState k4 = hsm_derivative(axpy(s, dt, k3), v_a, v_b, p);

    MotorState out;
    out.angle = s.angle + dt / 6.0 * (k1.angle + 2.0 * (k2.angle + k3.angle) + k4.angle);
    out.velocity = s.velocity + dt / 6.0 * (k1.velocity + 2.0 * (k2.velocity + k3.velocity) + k4.velocity);
    out.i_a = s.i_a + dt / 6.0 * (k1.i_a + 2.0 * (k2.i_a + k3.i_a) + k4.i_a);
    out.i_b = s.i_b + dt / 6.0 * (k1.i_b + 2.0 * (k2.i_b + k3.i_b) + k4.i_b);
    return out;
}

} // namespace hsmff
