#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsmff/motor.hpp"
#include "hsmff/regressor.hpp"
#include "hsmff/sim.hpp"
#include "hsmff/train.hpp"
#include "hsmff/trajectory.hpp"

namespace hsmff {

struct DemoConfig {
    int samples = 512;          // training points over one period
    int period_neurons = 2;     // hidden width for the one-period nets
    std::vector<int> neuron_sweep = {1, 2, 4, 8, 16};
    int epochs = 20000;
    double learn_rate = 0.02;
    double learn_rate_final = 1e-4;
    int restarts = 4;           // seeded restarts, best training loss wins
    double threshold_mod = 0.05; // max extrapolation error bound, mod net
    double threshold_raw = 0.5;  // min extrapolation error bound, raw net
    double inrange_accuracy = 0.01;

    void validate() const;
};

// Whole-tool configuration parsed from a documented key-value file
// (docs/CONFIG.md). Unknown keys are rejected.
struct ToolConfig {
    std::uint64_t seed = 1;
    std::string output_dir; // empty: resolved from HSMFF_OUT_DIR or "out"

    MotorParams motor;
    ControllerGains gains;
    int substeps = 10;
    RegressorSpec regressor; // sample_time kept equal to gains.sample_time

    int rotations = 3;
    MotionLimits limits;
    double dwell = 0.2;

    double collect_duration = 20.0;
    std::string collect_feedforward = "none"; // none | physical

    TrainConfig train;

    std::vector<double> velocities = {2.5, 5, 7.5, 10, 12.5, 15, 17.5, 20};
    std::vector<std::string> roster = {"none", "physical", "blackbox", "pgnn"};

    DemoConfig demo;

    std::string config_hash; // FNV-1a of the file bytes; empty for defaults

    void validate() const;
    std::string resolved_output_dir() const;
};

ToolConfig load_config(const std::string& path);
// Parses config text without touching the filesystem (used by tests).
ToolConfig parse_config(const std::string& text);

std::string fnv1a_hex(const std::string& bytes);

// Writes the default configuration as a commented file.
std::string default_config_text();

} // namespace hsmff
