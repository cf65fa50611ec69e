#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsmff/config.hpp"
#include "hsmff/model.hpp"
#include "hsmff/sim.hpp"
#include "hsmff/train.hpp"
#include "hsmff/trajectory.hpp"

namespace hsmff {

// Mean absolute tracking error over a reference window.
// Throws EmptyTrace for empty inputs.
double mean_absolute_error(std::span<const double> y_star, std::span<const double> y);

// Evaluation reference: one warm-up out-and-back cycle of the same stroke
// (removes the transient from differing initial conditions), then the
// measured forward stroke. Metrics are computed on [measure_begin,
// measure_end) only.
struct EvalProfile {
    ReferenceProfile profile;
    std::size_t measure_begin = 0;
    std::size_t measure_end = 0;
};

EvalProfile make_eval_profile(int rotations, double velocity, const MotionLimits& base,
                              double sample_time, double dwell);

// Writes <name>.manifest.json with the config hash, seed and extra fields so
// any artifact can be re-produced exactly.
void write_manifest(const std::filesystem::path& dir, const std::string& name,
                    const ToolConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra);

struct CollectionResult {
    SimTrace trace;
    std::filesystem::path trace_path;
};

// Closed-loop data-collection run on the configured plant: cyclic strokes
// between -rotations and +rotations turns until collect.duration is covered,
// feedback-only or with the nominal physical feedforward. Persists the trace.
CollectionResult run_collection(const ToolConfig& cfg,
                                const std::filesystem::path& out_dir);

struct TrainedModels {
    InverseModel physical;
    InverseModel blackbox;
    InverseModel pgnn;
    FitResult fit;
    TrainResult pgnn_result;
    TrainResult blackbox_result;

    const InverseModel* by_name(const std::string& name) const;
};

// Two-step sequential pipeline: least-squares physical fit, then residual
// NN training (PGNN) plus the raw-regressor black-box baseline.
TrainedModels train_models(const ToolConfig& cfg, const SimTrace& trace);

struct MaeRow {
    std::string experiment;
    std::string model;
    double velocity = 0.0;
    double mae = 0.0;           // rad
    double max_abs_error = 0.0; // rad
    bool extrapolation = false; // velocity above the training maximum
    std::string trace_file;
};

struct MaeReport {
    std::string experiment;
    double training_velocity_max = 0.0;
    std::vector<MaeRow> rows;

    const MaeRow* find(const std::string& model, double velocity) const;
    void write_csv(const std::filesystem::path& path) const;
    void write_long_csv(const std::filesystem::path& path) const;
    void write_json(const std::filesystem::path& path, const ToolConfig& cfg) const;
};

// Simulates every (model, velocity) pair of the roster on evaluation
// profiles and reports MAE over the measured stroke. Rows are ordered by
// (model, velocity) regardless of the worker count. Traces are persisted
// when out_dir is set.
MaeReport evaluate_models(const ToolConfig& cfg, const TrainedModels& models,
                          const std::vector<std::string>& roster,
                          const std::vector<double>& velocities,
                          const std::optional<std::filesystem::path>& out_dir,
                          const std::string& experiment_name, int jobs = 1);

// Full-roster comparison over the configured velocities.
MaeReport run_comparison(const ToolConfig& cfg, const TrainedModels& models,
                         const std::filesystem::path& out_dir, int jobs = 1);

// physical-vs-pgnn sweep over the configured velocity grid; rows above the
// training maximum are flagged as extrapolation.
MaeReport run_velocity_sweep(const ToolConfig& cfg, const TrainedModels& models,
                             const std::filesystem::path& out_dir, int jobs = 1);

struct CosinePeriodResult {
    std::string transform;             // "raw" | "mod"
    int neurons = 0;
    double max_error_inrange = 0.0;    // on [0, 2*pi)
    double max_error_extrapolation = 0.0; // on [2*pi, 6*pi]
};

struct CosineSweepRow {
    std::string transform;
    int neurons = 0;
    double max_error = 0.0; // on the data-covered range [0, 6*pi]
};

struct CosineReport {
    std::vector<CosinePeriodResult> period; // raw and mod variants
    std::vector<CosineSweepRow> sweep;
    int min_neurons_raw = -1; // -1: accuracy never reached within the sweep
    int min_neurons_mod = -1;
    double inrange_accuracy = 0.0;

    const CosinePeriodResult* period_result(const std::string& transform) const;
    void write_csv(const std::filesystem::path& path) const;
    void write_json(const std::filesystem::path& path, const ToolConfig& cfg) const;
};

// Learns u = cos(y) from one period with raw and mod(y, 2*pi) inputs and
// measures extrapolation over [0, 6*pi]; then sweeps the hidden width on
// full-range data to find the smallest net reaching the in-range accuracy.
CosineReport run_cosine_demo(const ToolConfig& cfg,
                             const std::optional<std::filesystem::path>& out_dir);

} // namespace hsmff
