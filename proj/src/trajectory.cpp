#include "hsmff/trajectory.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "hsmff/csv.hpp"
#include "hsmff/errors.hpp"

namespace hsmff {

void MotionLimits::validate() const {
    if (!(v_max > 0.0)) throw InvalidLimits("limits.v_max must be > 0");
    if (!(a_max > 0.0)) throw InvalidLimits("limits.a_max must be > 0");
    if (!(j_max > 0.0)) throw InvalidLimits("limits.j_max must be > 0");
}

ReferenceProfile::ReferenceProfile(std::vector<double> samples, double sample_time)
    : samples_(std::move(samples)), sample_time_(sample_time) {
    if (samples_.empty()) throw Error("reference profile must hold at least one sample");
    if (!(sample_time_ > 0.0)) throw Error("reference profile sample_time must be > 0");
}

void ReferenceProfile::to_csv(const std::string& path) const {
    std::vector<double> t(samples_.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = static_cast<double>(k) * sample_time_;
    const std::array<std::string, 2> header = {"t", "y_star"};
    const std::array<std::span<const double>, 2> cols = {t, samples_};
    csv::write_columns(path, header, cols);
}

namespace {

// Seven-phase rest-to-rest plan in normalized (positive) direction:
// jerk pattern {+j, 0, -j, 0, -j, 0, +j} with durations d[0..6].
struct MovePlan {
    std::array<double, 7> duration{};
    std::array<double, 7> jerk{};
    // state at the start of each segment plus the final state
    std::array<double, 8> t0{}, y0{}, v0{}, a0{};
    double total = 0.0;

    double position(double t) const {
        if (t >= total) return y0[7];
        int s = 0;
        while (s < 6 && t >= t0[s + 1]) ++s;
        const double dt = t - t0[s];
        return y0[s] + dt * (v0[s] + dt * (0.5 * a0[s] + dt * jerk[s] / 6.0));
    }
};

MovePlan plan_move(double distance, const MotionLimits& lim) {
    const double j = lim.j_max;
    const double a = lim.a_max;

    // peak velocity and the jerk/constant-acceleration split reaching it
    double v_peak, t_j, t_a;
    if (lim.v_max * j >= a * a) {
        t_j = a / j;
        t_a = lim.v_max / a - a / j;
    } else {
        t_j = std::sqrt(lim.v_max / j);
        t_a = 0.0;
    }
    v_peak = j * t_j * t_j + j * t_j * t_a;

    // distance consumed accelerating 0 -> v_peak (S-curve averages v_peak/2)
    double d_acc = 0.5 * v_peak * (2.0 * t_j + t_a);
    double t_v;
    if (distance >= 2.0 * d_acc) {
        t_v = (distance - 2.0 * d_acc) / v_peak;
    } else {
        // no cruise: shrink the peak velocity
        t_v = 0.0;
        const double aj = a * a / j;
        double vp = 0.5 * (-aj + std::sqrt(aj * aj + 4.0 * distance * a));
        if (vp >= aj) {
            t_j = a / j;
            t_a = std::max(0.0, vp / a - a / j);
        } else {
            t_j = std::cbrt(0.5 * distance / j);
            t_a = 0.0;
            vp = j * t_j * t_j;
        }
        v_peak = j * t_j * t_j + j * t_j * t_a;
        (void)vp;
    }

    MovePlan plan;
    plan.duration = {t_j, t_a, t_j, t_v, t_j, t_a, t_j};
    plan.jerk = {j, 0.0, -j, 0.0, -j, 0.0, j};

    double t = 0.0, y = 0.0, v = 0.0, acc = 0.0;
    for (int s = 0; s < 7; ++s) {
        plan.t0[s] = t;
        plan.y0[s] = y;
        plan.v0[s] = v;
        plan.a0[s] = acc;
        const double d = plan.duration[s];
        const double jj = plan.jerk[s];
        y += d * (v + d * (0.5 * acc + d * jj / 6.0));
        v += d * (acc + 0.5 * d * jj);
        acc += d * jj;
        t += d;
    }
    plan.t0[7] = t;
    plan.y0[7] = y;
    plan.v0[7] = v;
    plan.a0[7] = acc;
    plan.total = t;
    return plan;
}

} // namespace

ProfileBuilder::ProfileBuilder(double start_position, double sample_time)
    : position_(start_position), sample_time_(sample_time) {
    if (!(sample_time > 0.0)) throw InvalidLimits("sample_time must be > 0");
    samples_.push_back(start_position);
}

ProfileBuilder& ProfileBuilder::hold(double seconds) {
    if (seconds < 0.0) throw InvalidLimits("hold duration must be >= 0");
    const auto n = static_cast<std::size_t>(std::ceil(seconds / sample_time_ - 1e-9));
    samples_.insert(samples_.end(), n, position_);
    return *this;
}

ProfileBuilder& ProfileBuilder::move_to(double target, const MotionLimits& limits) {
    limits.validate();
    if (target == position_) return *this;

    const double dir = target > position_ ? 1.0 : -1.0;
    const MovePlan plan = plan_move(std::abs(target - position_), limits);
    const double start = position_;

    for (std::size_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * sample_time_;
        if (t < plan.total) {
            samples_.push_back(start + dir * plan.position(t));
        } else {
            samples_.push_back(target); // at rest from here on
            break;
        }
    }
    position_ = target;
    return *this;
}

ReferenceProfile ProfileBuilder::finish() && {
    return ReferenceProfile(std::move(samples_), sample_time_);
}

ReferenceProfile third_order_move(double start, double end, const MotionLimits& limits,
                                  double sample_time) {
    limits.validate();
    if (start == end) return ReferenceProfile({start}, sample_time);
    ProfileBuilder b(start, sample_time);
    b.move_to(end, limits);
    return std::move(b).finish();
}

ReferenceProfile back_and_forth(int rotations, const MotionLimits& limits,
                                double sample_time, double dwell, int repetitions) {
    limits.validate();
    if (rotations < 1) throw InvalidLimits("rotations must be >= 1");
    if (repetitions < 0) throw InvalidLimits("repetitions must be >= 0");

    const double reach = 2.0 * M_PI * static_cast<double>(rotations);
    ProfileBuilder b(-reach, sample_time);
    b.hold(dwell);
    for (int r = 0; r < repetitions; ++r) {
        b.move_to(reach, limits);
        b.hold(dwell);
        b.move_to(-reach, limits);
        b.hold(dwell);
    }
    return std::move(b).finish();
}

int repetitions_for_duration(double min_duration, int rotations,
                             const MotionLimits& limits, double sample_time,
                             double dwell) {
    if (!(min_duration > 0.0)) throw InvalidLimits("duration must be > 0");
    for (int reps = 1;; ++reps) {
        // sample-count arithmetic matches back_and_forth exactly
        const ReferenceProfile probe = back_and_forth(rotations, limits, sample_time,
                                                      dwell, reps);
        if (probe.duration() >= min_duration) return reps;
        if (reps > 1) {
            // extrapolate from the measured per-repetition cost, then verify
            const double per_rep = probe.duration() / reps;
            const int guess = static_cast<int>(std::ceil(min_duration / per_rep));
            if (guess > reps + 1) {
                const ReferenceProfile check = back_and_forth(rotations, limits,
                                                              sample_time, dwell, guess);
                if (check.duration() >= min_duration) return guess;
                reps = guess;
            }
        }
    }
}

} // namespace hsmff
