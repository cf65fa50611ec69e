#include "hsmff/sim.hpp"

#include <array>
#include <span>

#include "hsmff/csv.hpp"
#include "hsmff/errors.hpp"

namespace hsmff {

void ControllerGains::validate() const {
    if (!(sample_time > 0.0)) throw ConfigError("gains.sample_time must be > 0");
    if (current_kp < 0.0) throw ConfigError("gains.current_kp must be >= 0");
    if (current_ki < 0.0) throw ConfigError("gains.current_ki must be >= 0");
    if (position_kp < 0.0) throw ConfigError("gains.position_kp must be >= 0");
}

DqVoltages current_control_step(double i_d, double i_q, double i_q_ref,
                                CurrentLoopState& state, const ControllerGains& g) {
    const double e_d = -i_d;
    const double e_q = i_q_ref - i_q;
    DqVoltages v;
    if (g.current_ki != 0.0) {
        state.integral_d += g.sample_time * e_d;
        state.integral_q += g.sample_time * e_q;
        v.v_d = g.current_kp * e_d + g.current_ki * state.integral_d;
        v.v_q = g.current_kp * e_q + g.current_ki * state.integral_q;
    } else {
        v.v_d = g.current_kp * e_d;
        v.v_q = g.current_kp * e_q;
    }
    return v;
}

void SimTrace::reserve(std::size_t n) {
    for (auto* col : {&t, &y_star, &y, &u, &u_ff, &u_fb, &i_d, &i_q, &i_a, &i_b, &v_d, &v_q})
        col->reserve(n);
}

namespace {
const std::array<std::string, 12> kTraceHeader = {
    "t", "y_star", "y", "u", "u_ff", "u_fb", "i_d", "i_q", "i_a", "i_b", "v_d", "v_q"};
}

void SimTrace::to_csv(const std::string& path) const {
    const std::array<std::span<const double>, 12> cols = {
        t, y_star, y, u, u_ff, u_fb, i_d, i_q, i_a, i_b, v_d, v_q};
    csv::write_columns(path, kTraceHeader, cols);
}

SimTrace SimTrace::from_csv(const std::string& path) {
    const csv::Table table = csv::read(path);
    if (table.header.size() != kTraceHeader.size())
        throw IoError("trace csv: wrong column count in " + path);
    for (std::size_t j = 0; j < kTraceHeader.size(); ++j)
        if (table.header[j] != kTraceHeader[j])
            throw IoError("trace csv: unexpected header '" + table.header[j] + "' in " + path);

    SimTrace tr;
    tr.t = table.columns[0];
    tr.y_star = table.columns[1];
    tr.y = table.columns[2];
    tr.u = table.columns[3];
    tr.u_ff = table.columns[4];
    tr.u_fb = table.columns[5];
    tr.i_d = table.columns[6];
    tr.i_q = table.columns[7];
    tr.i_a = table.columns[8];
    tr.i_b = table.columns[9];
    tr.v_d = table.columns[10];
    tr.v_q = table.columns[11];
    if (tr.size() >= 2) tr.sample_time = tr.t[1] - tr.t[0];
    return tr;
}

SimTrace closed_loop_simulate(const ReferenceProfile& profile, FeedforwardSource* ff,
                              const MotorParams& params, const ControllerGains& gains,
                              int substeps) {
    params.validate();
    gains.validate();
    if (substeps < 1) throw ConfigError("sim.substeps must be >= 1");

    const double ts = gains.sample_time;
    const double dt = ts / static_cast<double>(substeps);
    const std::size_t n = profile.size();

    SimTrace trace;
    trace.sample_time = ts;
    trace.reserve(n);

    MotorState state;
    state.angle = profile.front(); // start at rest on the reference
    CurrentLoopState ctrl;

    for (std::size_t k = 0; k < n; ++k) {
        if (!state.finite())
            throw NonFiniteState("plant state diverged at sample " + std::to_string(k));

        const double y_ref = profile.at(static_cast<std::ptrdiff_t>(k));
        const double u_fb = gains.position_kp * (y_ref - state.angle);
        const double u_ff = ff ? ff->feedforward(k) : 0.0;
        const double u = u_fb + u_ff;

        const DqPair i_dq = dq_transform(state.angle, state.i_a, state.i_b, params.rotor_teeth);
        const double i_q_ref = u / params.motor_constant;
        const DqVoltages v_dq = current_control_step(i_dq.d, i_dq.q, i_q_ref, ctrl, gains);
        const CoilPair v_ab = inverse_dq_transform(state.angle, v_dq.v_d, v_dq.v_q,
                                                   params.rotor_teeth);

        trace.t.push_back(static_cast<double>(k) * ts);
        trace.y_star.push_back(y_ref);
        trace.y.push_back(state.angle);
        trace.u.push_back(u);
        trace.u_ff.push_back(u_ff);
        trace.u_fb.push_back(u_fb);
        trace.i_d.push_back(i_dq.d);
        trace.i_q.push_back(i_dq.q);
        trace.i_a.push_back(state.i_a);
        trace.i_b.push_back(state.i_b);
        trace.v_d.push_back(v_dq.v_d);
        trace.v_q.push_back(v_dq.v_q);

        for (int s = 0; s < substeps; ++s)
            state = rk4_step(state, v_ab.a, v_ab.b, dt, params);
    }
    if (!state.finite())
        throw NonFiniteState("plant state diverged at end of run");
    return trace;
}

} // namespace hsmff
