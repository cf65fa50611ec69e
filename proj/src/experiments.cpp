#include "hsmff/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "hsmff/csv.hpp"
#include "hsmff/errors.hpp"
#include "hsmff/feedforward.hpp"
#include "hsmff/kernels.hpp"

namespace hsmff {

using nlohmann::json;

double mean_absolute_error(std::span<const double> y_star, std::span<const double> y) {
    return kernels::mean_abs_diff(y_star, y);
}

EvalProfile make_eval_profile(int rotations, double velocity, const MotionLimits& base,
                              double sample_time, double dwell) {
    MotionLimits limits = base;
    limits.v_max = velocity;
    limits.validate();

    const double reach = 2.0 * M_PI * static_cast<double>(rotations);
    ProfileBuilder b(-reach, sample_time);
    // warm-up: out and back
    b.move_to(reach, limits).hold(dwell).move_to(-reach, limits).hold(dwell);
    const std::size_t begin = b.mark();
    b.move_to(reach, limits);
    const std::size_t end = b.mark();
    b.hold(0.05); // tail so lookahead never runs on clamped samples

    EvalProfile ep{std::move(b).finish(), begin, end};
    return ep;
}

namespace {

std::string format_velocity(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace

void write_manifest(const std::filesystem::path& dir, const std::string& name,
                    const ToolConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    json doc;
    doc["config_hash"] = cfg.config_hash.empty() ? "builtin-defaults" : cfg.config_hash;
    doc["seed"] = cfg.seed;
    for (const auto& [key, value] : extra) doc[key] = value;
    write_json_file(dir / (name + ".manifest.json"), doc);
}

CollectionResult run_collection(const ToolConfig& cfg,
                                const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    const double ts = cfg.gains.sample_time;
    const int reps = repetitions_for_duration(cfg.collect_duration, cfg.rotations,
                                              cfg.limits, ts, cfg.dwell);
    const ReferenceProfile profile =
        back_and_forth(cfg.rotations, cfg.limits, ts, cfg.dwell, reps);

    std::optional<FeedforwardEvaluator> ff;
    InverseModel nominal;
    if (cfg.collect_feedforward == "physical") {
        // nominal plant constants as the collection-time feedforward
        nominal = make_physical_model(
            cfg.regressor,
            PhysicalParams{cfg.motor.inertia, cfg.motor.viscous_friction});
        ff.emplace(nominal, profile);
    }

    CollectionResult result;
    result.trace = closed_loop_simulate(profile, ff ? &*ff : nullptr, cfg.motor,
                                        cfg.gains, cfg.substeps);
    result.trace_path = out_dir / "collection.csv";
    result.trace.to_csv(result.trace_path.string());

    write_manifest(out_dir, "collection", cfg,
                   {{"file", "collection.csv"},
                    {"samples", std::to_string(result.trace.size())},
                    {"duration_s", csv::format_double(profile.duration())},
                    {"feedforward", cfg.collect_feedforward}});
    return result;
}

const InverseModel* TrainedModels::by_name(const std::string& name) const {
    if (name == "physical") return &physical;
    if (name == "blackbox") return &blackbox;
    if (name == "pgnn") return &pgnn;
    if (name == "none") return nullptr;
    throw ConfigError("unknown model '" + name + "'");
}

TrainedModels train_models(const ToolConfig& cfg, const SimTrace& trace) {
    const RegressorData data = build_regressors(trace, cfg.regressor);

    TrainedModels models;
    models.fit = fit_physical(data);
    models.physical = make_physical_model(cfg.regressor, models.fit.params);

    TrainConfig pgnn_cfg = cfg.train;
    pgnn_cfg.seed = cfg.seed;
    TrainedModel pgnn = train_residual(data, models.fit.params, pgnn_cfg);
    models.pgnn = pgnn.model;
    models.pgnn_result = pgnn.result;

    TrainConfig bb_cfg = cfg.train;
    bb_cfg.seed = cfg.seed + 1;
    TrainedModel bb = train_blackbox(data, bb_cfg);
    models.blackbox = bb.model;
    models.blackbox_result = bb.result;

    models.physical.trained_velocity_max = cfg.limits.v_max;
    models.blackbox.trained_velocity_max = cfg.limits.v_max;
    models.pgnn.trained_velocity_max = cfg.limits.v_max;
    return models;
}

const MaeRow* MaeReport::find(const std::string& model, double velocity) const {
    for (const auto& row : rows)
        if (row.model == model && row.velocity == velocity) return &row;
    return nullptr;
}

void MaeReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "experiment,model,velocity,mae,max_abs_error,extrapolation,trace_file\n";
    for (const auto& r : rows)
        out << r.experiment << ',' << r.model << ',' << csv::format_double(r.velocity)
            << ',' << csv::format_double(r.mae) << ','
            << csv::format_double(r.max_abs_error) << ',' << (r.extrapolation ? 1 : 0)
            << ',' << r.trace_file << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void MaeReport::write_long_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "experiment,model,velocity,metric,value\n";
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.model << ',' << csv::format_double(r.velocity)
            << ",mae," << csv::format_double(r.mae) << '\n';
        out << r.experiment << ',' << r.model << ',' << csv::format_double(r.velocity)
            << ",max_abs_error," << csv::format_double(r.max_abs_error) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void MaeReport::write_json(const std::filesystem::path& path, const ToolConfig& cfg) const {
    json doc;
    doc["experiment"] = experiment;
    doc["config_hash"] = cfg.config_hash.empty() ? "builtin-defaults" : cfg.config_hash;
    doc["seed"] = cfg.seed;
    doc["training_velocity_max"] = training_velocity_max;
    json rows_json = json::array();
    for (const auto& r : rows)
        rows_json.push_back({{"model", r.model},
                             {"velocity", r.velocity},
                             {"mae", r.mae},
                             {"max_abs_error", r.max_abs_error},
                             {"extrapolation", r.extrapolation},
                             {"trace_file", r.trace_file}});
    doc["rows"] = rows_json;
    write_json_file(path, doc);
}

MaeReport evaluate_models(const ToolConfig& cfg, const TrainedModels& models,
                          const std::vector<std::string>& roster,
                          const std::vector<double>& velocities,
                          const std::optional<std::filesystem::path>& out_dir,
                          const std::string& experiment_name, int jobs) {
    cfg.validate();
    if (jobs < 1) jobs = 1;
    if (out_dir) std::filesystem::create_directories(*out_dir);

    struct Job {
        std::string model;
        double velocity;
    };
    std::vector<Job> jobs_list;
    for (const auto& model : roster)
        for (double v : velocities) jobs_list.push_back({model, v});

    MaeReport report;
    report.experiment = experiment_name;
    report.training_velocity_max = models.pgnn.trained_velocity_max;
    report.rows.resize(jobs_list.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs_list.size() || failed.load()) break;
            const Job& job = jobs_list[i];
            try {
                const EvalProfile ep = make_eval_profile(
                    cfg.rotations, job.velocity, cfg.limits, cfg.gains.sample_time,
                    cfg.dwell);
                const InverseModel* model = models.by_name(job.model);
                std::optional<FeedforwardEvaluator> ff;
                if (model) ff.emplace(*model, ep.profile);
                const SimTrace trace = closed_loop_simulate(
                    ep.profile, ff ? &*ff : nullptr, cfg.motor, cfg.gains, cfg.substeps);

                const std::size_t n = ep.measure_end - ep.measure_begin;
                std::span<const double> ref(trace.y_star.data() + ep.measure_begin, n);
                std::span<const double> got(trace.y.data() + ep.measure_begin, n);

                MaeRow row;
                row.experiment = experiment_name;
                row.model = job.model;
                row.velocity = job.velocity;
                row.mae = kernels::mean_abs_diff(ref, got);
                row.max_abs_error = kernels::max_abs_diff(ref, got);
                row.extrapolation = job.velocity > report.training_velocity_max;
                if (out_dir) {
                    const std::string file = experiment_name + "_" + job.model + "_v" +
                                             format_velocity(job.velocity) + ".csv";
                    trace.to_csv((*out_dir / file).string());
                    row.trace_file = file;
                }
                report.rows[i] = std::move(row);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty())
                    failure = job.model + " at v=" + format_velocity(job.velocity) +
                              ": " + e.what();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_workers = std::min<std::size_t>(jobs, jobs_list.size());
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw Error("evaluation failed: " + failure);

    if (out_dir) {
        report.write_csv(*out_dir / (experiment_name + "_mae.csv"));
        report.write_long_csv(*out_dir / (experiment_name + "_long.csv"));
        report.write_json(*out_dir / (experiment_name + "_mae.json"), cfg);
        write_manifest(*out_dir, experiment_name, cfg,
                       {{"rows", std::to_string(report.rows.size())}});
    }
    return report;
}

MaeReport run_comparison(const ToolConfig& cfg, const TrainedModels& models,
                         const std::filesystem::path& out_dir, int jobs) {
    return evaluate_models(cfg, models, cfg.roster, cfg.velocities, out_dir, "compare",
                           jobs);
}

MaeReport run_velocity_sweep(const ToolConfig& cfg, const TrainedModels& models,
                             const std::filesystem::path& out_dir, int jobs) {
    return evaluate_models(cfg, models, {"physical", "pgnn"}, cfg.velocities, out_dir,
                           "sweep", jobs);
}

namespace {

// Trains on scalar features normalized to [-1, 1] over the training range
// and returns the best restart by training loss.
struct CosineNet {
    NNParams nn;
    double center = 0.0;
    double half_range = 1.0;
    double loss = 0.0;
};

CosineNet train_cosine_net(std::span<const double> feature, std::span<const double> target,
                           int neurons, const DemoConfig& demo, std::uint64_t seed,
                           double stop_loss) {
    double lo = feature.front(), hi = feature.front();
    for (double f : feature) {
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    const double center = 0.5 * (lo + hi);
    const double half_range = hi > lo ? 0.5 * (hi - lo) : 1.0;

    kernels::TrainSet set;
    set.n_in = 1;
    set.count = feature.size();
    set.x.resize(feature.size());
    set.target.assign(target.begin(), target.end());
    for (std::size_t i = 0; i < feature.size(); ++i)
        set.x[i] = (feature[i] - center) / half_range;

    TrainConfig tc;
    tc.learn_rate = demo.learn_rate;
    tc.learn_rate_final = demo.learn_rate_final;
    tc.epochs = demo.epochs;
    tc.hidden_neurons = neurons;
    tc.stop_loss = stop_loss;

    // restarts are independent; run them on a small pool and keep the best
    // training loss (ties resolved by restart index)
    std::vector<TrainResult> results(static_cast<std::size_t>(demo.restarts));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= demo.restarts) break;
            TrainConfig local = tc;
            local.seed = seed + static_cast<std::uint64_t>(r);
            results[static_cast<std::size_t>(r)] = train_nn(set, local);
        }
    };
    const unsigned n_workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(demo.restarts));
    if (n_workers > 1) {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    } else {
        worker();
    }

    CosineNet best;
    best.center = center;
    best.half_range = half_range;
    best.loss = std::numeric_limits<double>::infinity();
    for (const auto& result : results) {
        if (result.best_loss < best.loss) {
            best.loss = result.best_loss;
            best.nn = result.nn;
        }
    }
    return best;
}

double eval_cosine_net(const CosineNet& net, double feature) {
    const double x = (feature - net.center) / net.half_range;
    return nn_forward(net.nn, {&x, 1});
}

} // namespace

const CosinePeriodResult* CosineReport::period_result(const std::string& transform) const {
    for (const auto& p : period)
        if (p.transform == transform) return &p;
    return nullptr;
}

void CosineReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "part,transform,neurons,metric,value\n";
    for (const auto& p : period) {
        out << "period," << p.transform << ',' << p.neurons << ",max_error_inrange,"
            << csv::format_double(p.max_error_inrange) << '\n';
        out << "period," << p.transform << ',' << p.neurons
            << ",max_error_extrapolation,"
            << csv::format_double(p.max_error_extrapolation) << '\n';
    }
    for (const auto& s : sweep)
        out << "sweep," << s.transform << ',' << s.neurons << ",max_error,"
            << csv::format_double(s.max_error) << '\n';
    out << "summary,raw," << min_neurons_raw << ",min_neurons_for_accuracy,"
        << csv::format_double(inrange_accuracy) << '\n';
    out << "summary,mod," << min_neurons_mod << ",min_neurons_for_accuracy,"
        << csv::format_double(inrange_accuracy) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void CosineReport::write_json(const std::filesystem::path& path, const ToolConfig& cfg) const {
    json doc;
    doc["config_hash"] = cfg.config_hash.empty() ? "builtin-defaults" : cfg.config_hash;
    doc["seed"] = cfg.seed;
    doc["inrange_accuracy"] = inrange_accuracy;
    doc["min_neurons_raw"] = min_neurons_raw;
    doc["min_neurons_mod"] = min_neurons_mod;
    json period_json = json::array();
    for (const auto& p : period)
        period_json.push_back({{"transform", p.transform},
                               {"neurons", p.neurons},
                               {"max_error_inrange", p.max_error_inrange},
                               {"max_error_extrapolation", p.max_error_extrapolation}});
    doc["period"] = period_json;
    json sweep_json = json::array();
    for (const auto& s : sweep)
        sweep_json.push_back({{"transform", s.transform},
                              {"neurons", s.neurons},
                              {"max_error", s.max_error}});
    doc["sweep"] = sweep_json;
    write_json_file(path, doc);
}

CosineReport run_cosine_demo(const ToolConfig& cfg,
                             const std::optional<std::filesystem::path>& out_dir) {
    cfg.validate();
    const DemoConfig& demo = cfg.demo;
    const double two_pi = 2.0 * M_PI;

    CosineReport report;
    report.inrange_accuracy = demo.inrange_accuracy;

    // --- one-period training data ---
    const auto n = static_cast<std::size_t>(demo.samples);
    std::vector<double> y_period(n), u_period(n);
    for (std::size_t i = 0; i < n; ++i) {
        y_period[i] = two_pi * static_cast<double>(i) / static_cast<double>(n);
        u_period[i] = std::cos(y_period[i]);
    }

    // evaluation grid over [0, 6*pi]
    const std::size_t n_eval = 3001;
    std::vector<double> y_eval(n_eval);
    for (std::size_t i = 0; i < n_eval; ++i)
        y_eval[i] = 3.0 * two_pi * static_cast<double>(i) / static_cast<double>(n_eval - 1);

    for (const bool use_mod : {false, true}) {
        std::vector<double> feature(n);
        for (std::size_t i = 0; i < n; ++i)
            feature[i] = use_mod ? mod_two_pi(y_period[i]) : y_period[i];
        const CosineNet net = train_cosine_net(feature, u_period, demo.period_neurons,
                                               demo, cfg.seed, 0.0);

        CosinePeriodResult res;
        res.transform = use_mod ? "mod" : "raw";
        res.neurons = demo.period_neurons;
        for (double y : y_eval) {
            const double f = use_mod ? mod_two_pi(y) : y;
            const double err = std::abs(eval_cosine_net(net, f) - std::cos(y));
            if (y < two_pi)
                res.max_error_inrange = std::max(res.max_error_inrange, err);
            else
                res.max_error_extrapolation = std::max(res.max_error_extrapolation, err);
        }
        report.period.push_back(res);
    }

    // --- neuron sweep on full-range data ---
    const std::size_t n_full = 3 * n;
    std::vector<double> y_full(n_full), u_full(n_full);
    for (std::size_t i = 0; i < n_full; ++i) {
        y_full[i] = 3.0 * two_pi * static_cast<double>(i) / static_cast<double>(n_full);
        u_full[i] = std::cos(y_full[i]);
    }

    for (const bool use_mod : {false, true}) {
        std::vector<double> feature(n_full);
        for (std::size_t i = 0; i < n_full; ++i)
            feature[i] = use_mod ? mod_two_pi(y_full[i]) : y_full[i];

        // once the mean-squared loss is well below the max-error target the
        // fit is good enough; stop instead of polishing further
        const double stop = demo.inrange_accuracy * demo.inrange_accuracy / 36.0;
        int& min_neurons = use_mod ? report.min_neurons_mod : report.min_neurons_raw;
        for (int neurons : demo.neuron_sweep) {
            const CosineNet net = train_cosine_net(feature, u_full, neurons, demo,
                                                   cfg.seed + (use_mod ? 7000 : 9000), stop);
            CosineSweepRow row;
            row.transform = use_mod ? "mod" : "raw";
            row.neurons = neurons;
            for (double y : y_eval) {
                const double f = use_mod ? mod_two_pi(y) : y;
                row.max_error = std::max(row.max_error,
                                         std::abs(eval_cosine_net(net, f) - std::cos(y)));
            }
            report.sweep.push_back(row);
            if (min_neurons < 0 && row.max_error <= demo.inrange_accuracy)
                min_neurons = neurons;
        }
    }

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        report.write_csv(*out_dir / "demo_cosine.csv");
        report.write_json(*out_dir / "demo_cosine.json", cfg);
        write_manifest(*out_dir, "demo_cosine", cfg, {});
    }
    return report;
}

} // namespace hsmff
