#include "hsmff/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>

#include "hsmff/errors.hpp"

namespace hsmff {

void TrainConfig::validate() const {
    if (!(learn_rate > 0.0)) throw ConfigError("train.learn_rate must be > 0");
    if (learn_rate_final < 0.0) throw ConfigError("train.learn_rate_final must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("train.beta1 must be in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("train.beta2 must be in [0,1)");
    if (!(epsilon > 0.0)) throw ConfigError("train.epsilon must be > 0");
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
    if (batch < 0) throw ConfigError("train.batch must be >= 0");
    if (regularization < 0.0) throw ConfigError("train.regularization must be >= 0");
    if (hidden_neurons < 1 || hidden_neurons > 1024)
        throw ConfigError("train.hidden_neurons must be in [1, 1024]");
    if (subsample < 1) throw ConfigError("train.subsample must be >= 1");
    if (stop_loss < 0.0) throw ConfigError("train.stop_loss must be >= 0");
}

FitResult fit_physical(const RegressorData& data) {
    if (data.count < 2) throw RankDeficient("need at least two regressor pairs");

    // Gram matrix and right-hand side of the normal equations
    double a00 = 0.0, a01 = 0.0, a11 = 0.0, b0 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < data.count; ++i) {
        const auto phi = data.row(i);
        const double r0 = delta_acceleration(phi, data.spec);
        const double r1 = delta_velocity(phi, data.spec);
        const double u = data.target[i];
        a00 += r0 * r0;
        a01 += r0 * r1;
        a11 += r1 * r1;
        b0 += r0 * u;
        b1 += r1 * u;
    }

    // eigenvalues of the symmetric 2x2 Gram matrix
    const double mean = 0.5 * (a00 + a11);
    const double det = a00 * a11 - a01 * a01;
    const double disc = std::sqrt(std::max(0.0, mean * mean - det));
    const double eig_max = mean + disc;
    const double eig_min = mean - disc;
    if (!(eig_max > 0.0) || eig_min <= 1e-12 * eig_max)
        throw RankDeficient("regressor Gram matrix is singular to 1e-12; "
                            "the data does not excite both coefficients");

    FitResult fit;
    fit.count = data.count;
    fit.params.theta_inertia = (a11 * b0 - a01 * b1) / det;
    fit.params.theta_viscous = (a00 * b1 - a01 * b0) / det;

    double sq = 0.0;
    for (std::size_t i = 0; i < data.count; ++i) {
        const auto phi = data.row(i);
        const double r = data.target[i] - fit.params.theta_inertia * delta_acceleration(phi, data.spec) -
                         fit.params.theta_viscous * delta_velocity(phi, data.spec);
        sq += r * r;
    }
    fit.residual_rms = std::sqrt(sq / static_cast<double>(data.count));

    if (fit.params.theta_inertia <= 0.0)
        std::fprintf(stderr,
                     "warning: fitted inertia coefficient %.3e is not positive; "
                     "check the excitation of the data set\n",
                     fit.params.theta_inertia);
    return fit;
}

namespace {

// Divergence guard: Adam's bounded steps can oscillate far above the
// starting loss without ever reaching infinity, so a runaway loss is flagged
// relative to where it started.
bool diverged(double loss, double initial_loss) {
    if (!std::isfinite(loss)) return true;
    return loss > 1e6 * std::max(initial_loss, 1e-3);
}

} // namespace

TrainResult train_nn(const kernels::TrainSet& set, const TrainConfig& config) {
    config.validate();
    if (set.count == 0) throw Error("train_nn: empty training set");

    NNParams nn = init_nn(set.n_in, config.hidden_neurons, config.seed);
    const std::size_t n_par = nn.parameter_count();

    std::vector<double> theta(n_par), m(n_par, 0.0), v(n_par, 0.0);
    nn.to_flat(theta);

    UniformRng shuffle_rng(config.seed ^ 0xd1b54a32d192ed03ull);
    std::vector<std::size_t> order;
    if (config.batch > 0) {
        order.resize(set.count);
        std::iota(order.begin(), order.end(), std::size_t{0});
    }

    TrainResult result;
    result.loss_history.reserve(static_cast<std::size_t>(config.epochs));
    result.best_loss = std::numeric_limits<double>::infinity();

    const double lambda = config.regularization;
    double initial_loss = 0.0;
    std::size_t adam_step = 0;

    const bool decay = config.learn_rate_final > 0.0 && config.epochs > 1;
    const double decay_ratio = decay ? config.learn_rate_final / config.learn_rate : 1.0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr =
            decay ? config.learn_rate *
                        std::pow(decay_ratio, static_cast<double>(epoch) /
                                                  static_cast<double>(config.epochs - 1))
                  : config.learn_rate;

        double epoch_loss;
        if (config.batch == 0) {
            // full batch: the evaluated loss doubles as the history entry
            kernels::BatchLossGrad lg = kernels::nn_loss_grad(nn, set, {}, lambda);
            epoch_loss = lg.loss;
            if (epoch == 0) initial_loss = epoch_loss;
            if (diverged(epoch_loss, initial_loss))
                throw DivergedLoss("training loss diverged at epoch " +
                                   std::to_string(epoch) + "; reduce train.learn_rate");
            if (epoch_loss < result.best_loss) {
                result.best_loss = epoch_loss;
                result.best_epoch = epoch;
                result.nn = nn;
            }
            result.loss_history.push_back(epoch_loss);
            if (config.stop_loss > 0.0 && epoch_loss <= config.stop_loss) break;

            ++adam_step;
            const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(adam_step));
            const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(adam_step));
            for (std::size_t p = 0; p < n_par; ++p) {
                m[p] = config.beta1 * m[p] + (1.0 - config.beta1) * lg.grad[p];
                v[p] = config.beta2 * v[p] + (1.0 - config.beta2) * lg.grad[p] * lg.grad[p];
                theta[p] -= lr * (m[p] / c1) / (std::sqrt(v[p] / c2) + config.epsilon);
            }
            nn.from_flat(theta);
        } else {
            epoch_loss = kernels::nn_loss(nn, set, lambda);
            if (epoch == 0) initial_loss = epoch_loss;
            if (diverged(epoch_loss, initial_loss))
                throw DivergedLoss("training loss diverged at epoch " +
                                   std::to_string(epoch) + "; reduce train.learn_rate");
            if (epoch_loss < result.best_loss) {
                result.best_loss = epoch_loss;
                result.best_epoch = epoch;
                result.nn = nn;
            }
            result.loss_history.push_back(epoch_loss);
            if (config.stop_loss > 0.0 && epoch_loss <= config.stop_loss) break;

            // seeded Fisher-Yates, then fixed-size slices
            for (std::size_t i = set.count - 1; i > 0; --i) {
                const std::size_t j = shuffle_rng.next_below(i + 1);
                std::swap(order[i], order[j]);
            }
            const auto bsz = static_cast<std::size_t>(config.batch);
            for (std::size_t start = 0; start < set.count; start += bsz) {
                const std::size_t len = std::min(bsz, set.count - start);
                std::span<const std::size_t> idx(order.data() + start, len);
                kernels::BatchLossGrad lg = kernels::nn_loss_grad(nn, set, idx, lambda);
                ++adam_step;
                const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(adam_step));
                const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(adam_step));
                for (std::size_t p = 0; p < n_par; ++p) {
                    m[p] = config.beta1 * m[p] + (1.0 - config.beta1) * lg.grad[p];
                    v[p] = config.beta2 * v[p] + (1.0 - config.beta2) * lg.grad[p] * lg.grad[p];
                    theta[p] -= lr * (m[p] / c1) / (std::sqrt(v[p] / c2) + config.epsilon);
                }
                nn.from_flat(theta);
            }
        }
    }

    // the post-update parameters are one more candidate
    result.final_loss = kernels::nn_loss(nn, set, lambda);
    if (diverged(result.final_loss, initial_loss))
        throw DivergedLoss("training loss diverged at the final epoch; "
                           "reduce train.learn_rate");
    if (result.final_loss < result.best_loss) {
        result.best_loss = result.final_loss;
        result.best_epoch = config.epochs;
        result.nn = nn;
    }
    return result;
}

kernels::TrainSet make_train_set(const RegressorData& data, TransformTag transform,
                                 std::vector<double>& scale_out, int stride) {
    if (stride < 1) throw ConfigError("train.subsample must be >= 1");
    const int n_in = transform == TransformTag::physics_guided ? 3 : data.spec.length();
    const std::size_t count = (data.count + static_cast<std::size_t>(stride) - 1) /
                              static_cast<std::size_t>(stride);
    kernels::TrainSet set;
    set.n_in = n_in;
    set.count = count;
    set.x.resize(count * static_cast<std::size_t>(n_in));
    set.target.assign(count, 0.0);

    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t src = i * static_cast<std::size_t>(stride);
        double* row = set.x.data() + i * static_cast<std::size_t>(n_in);
        if (transform == TransformTag::physics_guided) {
            const auto f = input_transform(data.row(src), data.spec);
            row[0] = f[0];
            row[1] = f[1];
            row[2] = f[2];
        } else {
            const auto phi = data.row(src);
            for (int j = 0; j < n_in; ++j) row[j] = phi[static_cast<std::size_t>(j)];
        }
        set.target[i] = data.target[src];
    }

    scale_out.assign(static_cast<std::size_t>(n_in), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        const double* row = set.x.data() + i * static_cast<std::size_t>(n_in);
        for (int j = 0; j < n_in; ++j)
            scale_out[static_cast<std::size_t>(j)] =
                std::max(scale_out[static_cast<std::size_t>(j)], std::abs(row[j]));
    }
    for (double& s : scale_out)
        if (!(s > 0.0)) s = 1.0;

    for (std::size_t i = 0; i < count; ++i) {
        double* row = set.x.data() + i * static_cast<std::size_t>(n_in);
        for (int j = 0; j < n_in; ++j) row[j] /= scale_out[static_cast<std::size_t>(j)];
    }
    return set;
}

namespace {

// Trains on unit-normalized targets for scale-free conditioning, then folds
// the target scale back into the output layer, so the stored network is in
// physical units. Loss numbers are reported in physical units as well.
TrainResult train_normalized(kernels::TrainSet& set, const TrainConfig& config) {
    double t_scale = 0.0;
    for (double t : set.target) t_scale = std::max(t_scale, std::abs(t));
    if (!(t_scale > 0.0)) t_scale = 1.0;
    for (double& t : set.target) t /= t_scale;

    TrainResult result = train_nn(set, config);

    for (double& w : result.nn.w2) w *= t_scale;
    result.nn.b2 *= t_scale;
    const double sq = t_scale * t_scale;
    for (double& l : result.loss_history) l *= sq;
    result.best_loss *= sq;
    result.final_loss *= sq;
    return result;
}

} // namespace

TrainedModel train_residual(const RegressorData& data, const PhysicalParams& physical,
                            const TrainConfig& config) {
    InverseModel model;
    model.kind = ModelKind::pgnn;
    model.regressor = data.spec;
    model.physical = physical;
    model.transform = TransformTag::physics_guided;

    kernels::TrainSet set = make_train_set(data, TransformTag::physics_guided,
                                           model.feature_scale, config.subsample);
    for (std::size_t i = 0; i < set.count; ++i) {
        const std::size_t src = i * static_cast<std::size_t>(config.subsample);
        set.target[i] = data.target[src] - model.physical_predict(data.row(src));
    }

    TrainedModel out;
    out.result = train_normalized(set, config);
    model.nn = out.result.nn;
    model.validate();
    out.model = model;
    return out;
}

TrainedModel train_blackbox(const RegressorData& data, const TrainConfig& config) {
    InverseModel model;
    model.kind = ModelKind::blackbox;
    model.regressor = data.spec;
    model.transform = TransformTag::identity;

    kernels::TrainSet set = make_train_set(data, TransformTag::identity,
                                           model.feature_scale, config.subsample);

    TrainedModel out;
    out.result = train_normalized(set, config);
    model.nn = out.result.nn;
    model.validate();
    out.model = model;
    return out;
}

} // namespace hsmff
