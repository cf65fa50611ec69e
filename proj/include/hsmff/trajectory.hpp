#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hsmff {

struct MotionLimits {
    double v_max = 15.0;   // rad/s
    double a_max = 80.0;   // rad/s^2
    double j_max = 1000.0; // rad/s^3

    void validate() const; // throws InvalidLimits
};

// Sampled position reference at a fixed period. Immutable after construction;
// the accessor clamps at both ends, so lookahead past the end returns the
// held final position and never fails.
class ReferenceProfile {
public:
    ReferenceProfile(std::vector<double> samples, double sample_time);

    double at(std::ptrdiff_t k) const {
        if (k < 0) k = 0;
        const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(samples_.size()) - 1;
        if (k > last) k = last;
        return samples_[static_cast<std::size_t>(k)];
    }

    std::size_t size() const { return samples_.size(); }
    double sample_time() const { return sample_time_; }
    double duration() const { return static_cast<double>(samples_.size() - 1) * sample_time_; }
    std::span<const double> samples() const { return samples_; }
    double front() const { return samples_.front(); }
    double back() const { return samples_.back(); }

    // Writes the profile as CSV with header "t,y_star".
    void to_csv(const std::string& path) const;

private:
    std::vector<double> samples_;
    double sample_time_;
};

// Assembles profiles out of rest-to-rest moves and holds. Positions are
// sampled on the global grid t = k*T_s, so concatenation introduces no
// drift in the sample clock.
class ProfileBuilder {
public:
    ProfileBuilder(double start_position, double sample_time);

    ProfileBuilder& hold(double seconds);
    ProfileBuilder& move_to(double target, const MotionLimits& limits);

    // Index of the next sample to be appended (start of the next piece).
    std::size_t mark() const { return samples_.size(); }
    std::size_t size() const { return samples_.size(); }
    double position() const { return position_; }

    ReferenceProfile finish() &&;

private:
    std::vector<double> samples_;
    double position_;
    double sample_time_;
};

// Rest-to-rest move with piecewise-constant jerk (up to seven segments;
// degenerate segments collapse for short moves). Monotone between endpoints.
ReferenceProfile third_order_move(double start, double end, const MotionLimits& limits,
                                  double sample_time);

// Cyclic data-collection motion between -rotations and +rotations full turns,
// with dwell holds at each end. Starts at rest at -rotations turns; each
// repetition is one full out-and-back cycle.
ReferenceProfile back_and_forth(int rotations, const MotionLimits& limits,
                                double sample_time, double dwell, int repetitions);

// Repetitions needed so that back_and_forth covers at least min_duration.
int repetitions_for_duration(double min_duration, int rotations,
                             const MotionLimits& limits, double sample_time,
                             double dwell);

} // namespace hsmff
