#pragma once

#include <cstdint>
#include <vector>

#include "hsmff/kernels.hpp"
#include "hsmff/model.hpp"
#include "hsmff/regressor.hpp"

namespace hsmff {

struct TrainConfig {
    double learn_rate = 0.01;
    double learn_rate_final = 0.0; // > 0: exponential decay toward this value
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 800;
    int batch = 0; // 0 = full batch
    std::uint64_t seed = 1;
    double regularization = 0.0; // scalar lambda in ||lambda * theta||^2
    int hidden_neurons = 16;
    int subsample = 1;      // keep every n-th regressor pair for NN training
    double stop_loss = 0.0; // > 0: stop once the epoch loss reaches this value

    void validate() const;
};

struct FitResult {
    PhysicalParams params;
    double residual_rms = 0.0;
    std::size_t count = 0;
};

// Least-squares fit of u against [delta2 y, delta y] via the 2x2 normal
// equations. Throws RankDeficient when the Gram matrix is singular relative
// to 1e-12 (unexciting data, e.g. pure standstill). Warns on stderr if the
// inertia coefficient comes out non-positive.
FitResult fit_physical(const RegressorData& data);

struct TrainResult {
    NNParams nn;                      // parameters of the best epoch
    std::vector<double> loss_history; // full-set loss per epoch, pre-update
    int best_epoch = 0;
    double best_loss = 0.0;
    double final_loss = 0.0;
};

// Adam on the mean-squared-error objective; full-batch by default,
// mini-batches with a seeded shuffle otherwise. Deterministic given the
// seed. Throws DivergedLoss when the loss leaves the finite (or sane) range.
TrainResult train_nn(const kernels::TrainSet& set, const TrainConfig& config);

// Builds the scaled NN feature matrix for the given transform from regressor
// data, keeping every stride-th pair; scales are the per-feature max-abs over
// the set (1 where degenerate).
kernels::TrainSet make_train_set(const RegressorData& data, TransformTag transform,
                                 std::vector<double>& scale_out, int stride = 1);

struct TrainedModel {
    InverseModel model;
    TrainResult result;
};

// Two-step sequential identification: theta_phy is frozen and the NN learns
// the residual u - u_phy on the rotation-invariant features.
TrainedModel train_residual(const RegressorData& data, const PhysicalParams& physical,
                            const TrainConfig& config);

// Same loop with no physical term and the identity transform on raw phi.
TrainedModel train_blackbox(const RegressorData& data, const TrainConfig& config);

} // namespace hsmff
