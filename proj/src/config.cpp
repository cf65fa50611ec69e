#include "hsmff/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hsmff/errors.hpp"

namespace hsmff {

void DemoConfig::validate() const {
    if (samples < 8) throw ConfigError("demo.samples must be >= 8");
    if (period_neurons < 1) throw ConfigError("demo.period_neurons must be >= 1");
    if (neuron_sweep.empty()) throw ConfigError("demo.neuron_sweep must not be empty");
    for (int n : neuron_sweep)
        if (n < 1) throw ConfigError("demo.neuron_sweep entries must be >= 1");
    if (epochs < 1) throw ConfigError("demo.epochs must be >= 1");
    if (!(learn_rate > 0.0)) throw ConfigError("demo.learn_rate must be > 0");
    if (restarts < 1) throw ConfigError("demo.restarts must be >= 1");
    if (!(threshold_mod > 0.0) || !(threshold_raw > 0.0) || !(inrange_accuracy > 0.0))
        throw ConfigError("demo thresholds must be > 0");
}

void ToolConfig::validate() const {
    motor.validate();
    gains.validate();
    if (substeps < 1) throw ConfigError("sim.substeps must be >= 1");
    regressor.validate();
    if (rotations < 1) throw ConfigError("trajectory.rotations must be >= 1");
    limits.validate();
    if (dwell < 0.0) throw ConfigError("trajectory.dwell must be >= 0");
    if (!(collect_duration > 0.0)) throw ConfigError("collect.duration must be > 0");
    if (collect_feedforward != "none" && collect_feedforward != "physical")
        throw ConfigError("collect.feedforward must be 'none' or 'physical'");
    train.validate();
    if (velocities.empty()) throw ConfigError("experiment.velocities must not be empty");
    for (double v : velocities)
        if (!(v > 0.0)) throw ConfigError("experiment.velocities must be strictly positive");
    if (!std::is_sorted(velocities.begin(), velocities.end()))
        throw ConfigError("experiment.velocities must be sorted ascending");
    for (std::size_t i = 1; i < velocities.size(); ++i)
        if (velocities[i] == velocities[i - 1])
            throw ConfigError("experiment.velocities must be strictly increasing");
    if (roster.empty()) throw ConfigError("experiment.roster must not be empty");
    for (const auto& r : roster)
        if (r != "none" && r != "physical" && r != "blackbox" && r != "pgnn")
            throw ConfigError("experiment.roster entry '" + r + "' is unknown");
    demo.validate();
}

std::string ToolConfig::resolved_output_dir() const {
    if (!output_dir.empty()) return output_dir;
    if (const char* env = std::getenv("HSMFF_OUT_DIR"); env && *env) return env;
    return "out";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<RippleComponent> parse_ripple(const std::string& key, const std::string& v) {
    std::vector<RippleComponent> out;
    for (const auto& item : split_list(v)) {
        RippleComponent r;
        std::stringstream ss(item);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ':')) fields.push_back(trim(field));
        if (fields.size() != 3)
            throw ConfigError("key '" + key + "': ripple entries are harmonic:amplitude:phase");
        r.harmonic = static_cast<int>(parse_int(key, fields[0]));
        r.amplitude = parse_double(key, fields[1]);
        r.phase = parse_double(key, fields[2]);
        out.push_back(r);
    }
    return out;
}

} // namespace

ToolConfig parse_config(const std::string& text) {
    ToolConfig cfg;

    using Setter = std::function<void(ToolConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> schema = {
        {"seed", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.seed = static_cast<std::uint64_t>(parse_int(k, v));
         }},
        {"output.dir", [](ToolConfig& c, const std::string&, const std::string& v) {
             c.output_dir = v;
         }},
        {"motor.inertia", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.inertia = parse_double(k, v);
         }},
        {"motor.viscous_friction", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.viscous_friction = parse_double(k, v);
         }},
        {"motor.motor_constant", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.motor_constant = parse_double(k, v);
         }},
        {"motor.rotor_teeth", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.rotor_teeth = static_cast<int>(parse_int(k, v));
         }},
        {"motor.inductance", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.inductance = parse_double(k, v);
         }},
        {"motor.resistance", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.resistance = parse_double(k, v);
         }},
        {"parasitic.coulomb_level", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.parasitic.coulomb_level = parse_double(k, v);
         }},
        {"parasitic.coulomb_smoothing", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.parasitic.coulomb_smoothing = parse_double(k, v);
         }},
        {"parasitic.ripple", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.motor.parasitic.ripple = parse_ripple(k, v);
         }},
        {"gains.current_kp", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.gains.current_kp = parse_double(k, v);
         }},
        {"gains.current_ki", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.gains.current_ki = parse_double(k, v);
         }},
        {"gains.position_kp", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.gains.position_kp = parse_double(k, v);
         }},
        {"gains.sample_time", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.gains.sample_time = parse_double(k, v);
         }},
        {"sim.substeps", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.substeps = static_cast<int>(parse_int(k, v));
         }},
        {"regressor.n_a", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.regressor.n_a = static_cast<int>(parse_int(k, v));
         }},
        {"regressor.n_b", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.regressor.n_b = static_cast<int>(parse_int(k, v));
         }},
        {"regressor.n_k", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.regressor.n_k = static_cast<int>(parse_int(k, v));
         }},
        {"trajectory.rotations", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.rotations = static_cast<int>(parse_int(k, v));
         }},
        {"trajectory.v_max", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.limits.v_max = parse_double(k, v);
         }},
        {"trajectory.a_max", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.limits.a_max = parse_double(k, v);
         }},
        {"trajectory.j_max", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.limits.j_max = parse_double(k, v);
         }},
        {"trajectory.dwell", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.dwell = parse_double(k, v);
         }},
        {"collect.duration", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.collect_duration = parse_double(k, v);
         }},
        {"collect.feedforward", [](ToolConfig& c, const std::string&, const std::string& v) {
             c.collect_feedforward = v;
         }},
        {"train.learn_rate", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.learn_rate = parse_double(k, v);
         }},
        {"train.learn_rate_final", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.learn_rate_final = parse_double(k, v);
         }},
        {"train.beta1", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.beta1 = parse_double(k, v);
         }},
        {"train.beta2", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.beta2 = parse_double(k, v);
         }},
        {"train.epsilon", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.epsilon = parse_double(k, v);
         }},
        {"train.epochs", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.epochs = static_cast<int>(parse_int(k, v));
         }},
        {"train.batch", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.batch = static_cast<int>(parse_int(k, v));
         }},
        {"train.regularization", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.regularization = parse_double(k, v);
         }},
        {"train.hidden_neurons", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.hidden_neurons = static_cast<int>(parse_int(k, v));
         }},
        {"train.subsample", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.train.subsample = static_cast<int>(parse_int(k, v));
         }},
        {"experiment.velocities", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.velocities.clear();
             for (const auto& item : split_list(v)) c.velocities.push_back(parse_double(k, item));
         }},
        {"experiment.roster", [](ToolConfig& c, const std::string&, const std::string& v) {
             c.roster = split_list(v);
         }},
        {"demo.samples", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.samples = static_cast<int>(parse_int(k, v));
         }},
        {"demo.period_neurons", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.period_neurons = static_cast<int>(parse_int(k, v));
         }},
        {"demo.neuron_sweep", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.neuron_sweep.clear();
             for (const auto& item : split_list(v))
                 c.demo.neuron_sweep.push_back(static_cast<int>(parse_int(k, item)));
         }},
        {"demo.epochs", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.epochs = static_cast<int>(parse_int(k, v));
         }},
        {"demo.learn_rate", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.learn_rate = parse_double(k, v);
         }},
        {"demo.learn_rate_final", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.learn_rate_final = parse_double(k, v);
         }},
        {"demo.restarts", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.restarts = static_cast<int>(parse_int(k, v));
         }},
        {"demo.threshold_mod", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.threshold_mod = parse_double(k, v);
         }},
        {"demo.threshold_raw", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.threshold_raw = parse_double(k, v);
         }},
        {"demo.inrange_accuracy", [](ToolConfig& c, const std::string& k, const std::string& v) {
             c.demo.inrange_accuracy = parse_double(k, v);
         }},
    };

    std::stringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = schema.find(key);
        if (it == schema.end())
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(cfg, key, value);
    }

    // one sample clock for the controller and the regressor window
    cfg.regressor.sample_time = cfg.gains.sample_time;
    cfg.train.seed = cfg.seed;
    cfg.config_hash = fnv1a_hex(text);
    cfg.validate();
    return cfg;
}

ToolConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string default_config_text() {
    return R"(# hsmff configuration (schema v1, see docs/CONFIG.md)
# Every run derives all randomness from this one seed.
seed = 1
# output.dir = out            # default: $HSMFF_OUT_DIR, else ./out

# ---- plant ----
motor.inertia = 5.7e-5        # kg*m^2
motor.viscous_friction = 2e-3 # N*m*s/rad
motor.motor_constant = 0.1    # N*m/A
motor.rotor_teeth = 50
motor.inductance = 1.5e-3     # H
motor.resistance = 0.55       # ohm

# Parasitics: smooth Coulomb friction plus detent-like torque ripple at
# integer multiples of the rotor tooth count. Set coulomb_level = 0 and
# ripple empty for the ideal plant.
parasitic.coulomb_level = 0.015     # N*m
parasitic.coulomb_smoothing = 0.2   # rad/s
parasitic.ripple = 50:0.0008:0.0, 100:0.0004:1.0

# ---- controllers ----
gains.current_kp = 6.6        # V/A
gains.current_ki = 40000      # V/(A*s)
gains.position_kp = 5.0       # N*m/rad
gains.sample_time = 1e-4      # s
sim.substeps = 10             # RK4 steps per controller period

# ---- inverse-model regressor ----
regressor.n_a = 4
regressor.n_b = 0
regressor.n_k = 1

# ---- reference trajectories ----
trajectory.rotations = 3      # strokes between -3 and +3 turns
trajectory.v_max = 15         # rad/s
trajectory.a_max = 80         # rad/s^2
trajectory.j_max = 1000       # rad/s^3
trajectory.dwell = 0.2        # s of standstill between strokes

# ---- data collection ----
collect.duration = 20         # s (desk scale; 80 matches the full protocol)
collect.feedforward = none    # none | physical

# ---- NN training ----
train.learn_rate = 0.01
train.learn_rate_final = 0.0005
train.beta1 = 0.9
train.beta2 = 0.999
train.epsilon = 1e-8
train.epochs = 1000
train.batch = 4096            # 0 = full batch
train.regularization = 0
train.hidden_neurons = 16
train.subsample = 2           # keep every n-th pair for NN training

# ---- evaluation ----
experiment.velocities = 2.5, 5, 7.5, 10, 12.5, 15, 17.5, 20
experiment.roster = none, physical, blackbox, pgnn

# ---- cosine extrapolation demo ----
demo.samples = 512
demo.period_neurons = 2
demo.neuron_sweep = 1, 2, 4, 8, 16
demo.epochs = 20000
demo.learn_rate = 0.02
demo.learn_rate_final = 1e-4
demo.restarts = 4
demo.threshold_mod = 0.05
demo.threshold_raw = 0.5
demo.inrange_accuracy = 0.01
)";
}

} // namespace hsmff
