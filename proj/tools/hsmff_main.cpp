// hsmff: simulation and identification toolkit for hybrid-stepper feedforward
// control. Subcommands cover the full pipeline: collect closed-loop data,
// fit the physical inverse model, train the NN-based models, and evaluate
// tracking on reference strokes.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hsmff/config.hpp"
#include "hsmff/csv.hpp"
#include "hsmff/errors.hpp"
#include "hsmff/experiments.hpp"
#include "hsmff/feedforward.hpp"
#include "hsmff/kernels.hpp"
#include "hsmff/model.hpp"
#include "hsmff/train.hpp"

namespace fs = std::filesystem;
using namespace hsmff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;   // config / usage errors
constexpr int kExitNumeric = 2;  // divergence, rank deficiency, non-finite state

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    int jobs = 1;
    bool verbose = false;
};

ToolConfig resolve_config(const GlobalArgs& args) {
    ToolConfig cfg = args.config_path.empty() ? parse_config(default_config_text())
                                              : load_config(args.config_path);
    if (args.seed_override) {
        cfg.seed = *args.seed_override;
        cfg.train.seed = cfg.seed;
    }
    if (args.out_override) cfg.output_dir = *args.out_override;
    cfg.validate();
    return cfg;
}

fs::path out_dir_of(const ToolConfig& cfg) { return cfg.resolved_output_dir(); }

TrainedModels load_models(const fs::path& dir) {
    TrainedModels models;
    models.physical = InverseModel::load((dir / "model_physical.json").string());
    models.blackbox = InverseModel::load((dir / "model_blackbox.json").string());
    models.pgnn = InverseModel::load((dir / "model_pgnn.json").string());
    return models;
}

void save_models(const TrainedModels& models, const fs::path& dir) {
    models.physical.save((dir / "model_physical.json").string());
    models.blackbox.save((dir / "model_blackbox.json").string());
    models.pgnn.save((dir / "model_pgnn.json").string());
}

void write_loss_csv(const fs::path& path, const TrainResult& result) {
    std::vector<double> epoch(result.loss_history.size());
    for (std::size_t i = 0; i < epoch.size(); ++i) epoch[i] = static_cast<double>(i);
    csv::Table table;
    table.header = {"epoch", "loss"};
    table.columns = {epoch, result.loss_history};
    csv::write(path.string(), table);
}

TrainedModels train_and_save(const ToolConfig& cfg, const SimTrace& trace,
                             const fs::path& dir) {
    TrainedModels models = train_models(cfg, trace);
    save_models(models, dir);
    write_loss_csv(dir / "loss_pgnn.csv", models.pgnn_result);
    write_loss_csv(dir / "loss_blackbox.csv", models.blackbox_result);
    write_manifest(dir, "models", cfg,
                   {{"theta_inertia", csv::format_double(models.fit.params.theta_inertia)},
                    {"theta_viscous", csv::format_double(models.fit.params.theta_viscous)},
                    {"fit_residual_rms", csv::format_double(models.fit.residual_rms)}});
    std::printf("theta_inertia = %.6e N*m*s^2/rad\n", models.fit.params.theta_inertia);
    std::printf("theta_viscous = %.6e N*m*s/rad\n", models.fit.params.theta_viscous);
    std::printf("pgnn final training loss     = %.6e\n", models.pgnn_result.best_loss);
    std::printf("blackbox final training loss = %.6e\n", models.blackbox_result.best_loss);
    return models;
}

SimTrace load_or_collect(const ToolConfig& cfg, const fs::path& dir,
                         const std::string& trace_arg, bool verbose) {
    if (!trace_arg.empty()) return SimTrace::from_csv(trace_arg);
    const fs::path cached = dir / "collection.csv";
    if (fs::exists(cached)) {
        if (verbose) std::printf("using existing trace %s\n", cached.string().c_str());
        return SimTrace::from_csv(cached.string());
    }
    if (verbose) std::printf("collecting training data...\n");
    return run_collection(cfg, dir).trace;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid stepper feedforward toolkit"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--config", args.config_path, "configuration file (key = value)");
    app.add_option("--seed", args.seed_override, "override the config seed");
    app.add_option("--jobs", args.jobs, "worker pool size for sweeps")
        ->check(CLI::Range(1, 64));
    app.add_option("--out", args.out_override,
                   "output directory (default: config, $HSMFF_OUT_DIR, ./out)");
    app.add_flag("-v,--verbose", args.verbose, "chatty progress output");
    bool serial = false;
    app.add_flag("--serial", serial, "disable the OpenMP kernels");

    auto* cmd_collect = app.add_subcommand("collect", "simulate the data-collection run");
    auto* cmd_fit = app.add_subcommand("fit", "least-squares physical identification");
    auto* cmd_train = app.add_subcommand("train", "fit + NN training (pgnn and blackbox)");
    auto* cmd_simulate = app.add_subcommand("simulate", "closed-loop run with a model file");
    auto* cmd_compare = app.add_subcommand("compare", "tracking comparison over the roster");
    auto* cmd_sweep = app.add_subcommand("sweep", "physical-vs-pgnn velocity sweep");
    auto* cmd_demo = app.add_subcommand("demo-cosine", "input-transform extrapolation demo");

    std::string trace_arg;
    cmd_fit->add_option("--trace", trace_arg, "trace CSV (default: collect or reuse)");
    cmd_train->add_option("--trace", trace_arg, "trace CSV (default: collect or reuse)");

    std::string model_arg;
    double sim_velocity = 0.0;
    cmd_simulate->add_option("--model", model_arg, "model JSON file (omit for none)");
    cmd_simulate->add_option("--velocity", sim_velocity,
                             "stroke velocity (default: trajectory.v_max)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (serial) kernels::set_parallel(false);
        const ToolConfig cfg = resolve_config(args);
        const fs::path dir = out_dir_of(cfg);
        fs::create_directories(dir);

        if (cmd_collect->parsed()) {
            const CollectionResult result = run_collection(cfg, dir);
            std::printf("wrote %s (%zu samples)\n", result.trace_path.string().c_str(),
                        result.trace.size());
            return kExitOk;
        }

        if (cmd_fit->parsed()) {
            const SimTrace trace = load_or_collect(cfg, dir, trace_arg, args.verbose);
            const RegressorData data = build_regressors(trace, cfg.regressor);
            const FitResult fit = fit_physical(data);
            const InverseModel model = make_physical_model(cfg.regressor, fit.params);
            model.save((dir / "model_physical.json").string());
            write_manifest(dir, "model_physical", cfg,
                           {{"theta_inertia", csv::format_double(fit.params.theta_inertia)},
                            {"theta_viscous", csv::format_double(fit.params.theta_viscous)},
                            {"residual_rms", csv::format_double(fit.residual_rms)}});
            std::printf("theta_inertia = %.6e N*m*s^2/rad\n", fit.params.theta_inertia);
            std::printf("theta_viscous = %.6e N*m*s/rad\n", fit.params.theta_viscous);
            std::printf("residual rms  = %.6e N*m over %zu pairs\n", fit.residual_rms,
                        fit.count);
            return kExitOk;
        }

        if (cmd_train->parsed()) {
            const SimTrace trace = load_or_collect(cfg, dir, trace_arg, args.verbose);
            train_and_save(cfg, trace, dir);
            return kExitOk;
        }

        if (cmd_simulate->parsed()) {
            const double velocity = sim_velocity > 0.0 ? sim_velocity : cfg.limits.v_max;
            const EvalProfile ep = make_eval_profile(cfg.rotations, velocity, cfg.limits,
                                                     cfg.gains.sample_time, cfg.dwell);
            std::optional<InverseModel> model;
            std::optional<FeedforwardEvaluator> ff;
            if (!model_arg.empty()) {
                model = InverseModel::load(model_arg);
                ff.emplace(*model, ep.profile);
            }
            const SimTrace trace = closed_loop_simulate(ep.profile, ff ? &*ff : nullptr,
                                                        cfg.motor, cfg.gains, cfg.substeps);
            const fs::path out = dir / "simulate.csv";
            trace.to_csv(out.string());
            const std::size_t n = ep.measure_end - ep.measure_begin;
            const double mae = mean_absolute_error(
                {trace.y_star.data() + ep.measure_begin, n},
                {trace.y.data() + ep.measure_begin, n});
            write_manifest(dir, "simulate", cfg,
                           {{"model", model_arg.empty() ? "none" : model_arg},
                            {"velocity", csv::format_double(velocity)},
                            {"mae", csv::format_double(mae)}});
            std::printf("wrote %s; stroke MAE = %.6e rad\n", out.string().c_str(), mae);
            return kExitOk;
        }

        if (cmd_compare->parsed() || cmd_sweep->parsed()) {
            const SimTrace trace = load_or_collect(cfg, dir, "", args.verbose);
            TrainedModels models;
            if (fs::exists(dir / "model_pgnn.json") &&
                fs::exists(dir / "model_blackbox.json") &&
                fs::exists(dir / "model_physical.json")) {
                if (args.verbose) std::printf("loading models from %s\n", dir.string().c_str());
                models = load_models(dir);
            } else {
                if (args.verbose) std::printf("training models...\n");
                models = train_and_save(cfg, trace, dir);
            }

            const MaeReport report = cmd_compare->parsed()
                                         ? run_comparison(cfg, models, dir, args.jobs)
                                         : run_velocity_sweep(cfg, models, dir, args.jobs);
            for (const auto& row : report.rows)
                std::printf("%-8s v=%-6g mae=%.6e rad max=%.6e rad%s\n", row.model.c_str(),
                            row.velocity, row.mae, row.max_abs_error,
                            row.extrapolation ? "  [extrapolation]" : "");
            return kExitOk;
        }

        if (cmd_demo->parsed()) {
            const CosineReport report = run_cosine_demo(cfg, dir);
            for (const auto& p : report.period)
                std::printf("period %-3s n1=%d  in-range max err %.4e  extrapolation max err %.4e\n",
                            p.transform.c_str(), p.neurons, p.max_error_inrange,
                            p.max_error_extrapolation);
            for (const auto& s : report.sweep)
                std::printf("sweep  %-3s n1=%-3d max err %.4e\n", s.transform.c_str(),
                            s.neurons, s.max_error);
            std::printf("min neurons for max err <= %g: mod=%d raw=%d%s\n",
                        report.inrange_accuracy, report.min_neurons_mod,
                        report.min_neurons_raw,
                        report.min_neurons_raw < 0 ? " (raw never reached it)" : "");
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InvalidLimits& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const NonFiniteState& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        std::fprintf(stderr, "hint: lower the gains or raise sim.substeps\n");
        return kExitNumeric;
    } catch (const RankDeficient& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        std::fprintf(stderr, "hint: collect data with motion in it, not just standstill\n");
        return kExitNumeric;
    } catch (const DivergedLoss& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        std::fprintf(stderr, "hint: reduce train.learn_rate\n");
        return kExitNumeric;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
