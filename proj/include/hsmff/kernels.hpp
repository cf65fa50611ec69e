#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsmff/nn.hpp"

namespace hsmff::kernels {

// Samples are accumulated in fixed blocks of this width and the block
// partials are combined in block order. The result is therefore bit-identical
// between the serial and OpenMP paths and independent of the thread count.
inline constexpr std::size_t block_size = 4096;

// Dense training set: row-major features plus scalar targets.
struct TrainSet {
    int n_in = 0;
    std::size_t count = 0;
    std::vector<double> x;      // count x n_in
    std::vector<double> target; // count

    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * static_cast<std::size_t>(n_in),
                static_cast<std::size_t>(n_in)};
    }
};

// Mean-squared-error loss and its gradient over the flat parameter vector
// [w1, b1, w2, b2]; both include the ||lambda * theta||^2 penalty.
struct BatchLossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

namespace serial {

// indices may be empty, meaning "all samples in order".
BatchLossGrad nn_loss_grad(const NNParams& nn, const TrainSet& set,
                           std::span<const std::size_t> indices, double lambda);
double nn_loss(const NNParams& nn, const TrainSet& set, double lambda);
double mean_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

} // namespace serial

namespace parallel {

BatchLossGrad nn_loss_grad(const NNParams& nn, const TrainSet& set,
                           std::span<const std::size_t> indices, double lambda);
double nn_loss(const NNParams& nn, const TrainSet& set, double lambda);
double mean_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

// index-parallel map with independent writes
void for_each_index(std::size_t n, void* ctx, void (*fn)(void* ctx, std::size_t i));

} // namespace parallel

// Runtime switch for the dispatching entry points below; defaults to the
// OpenMP path when the build has it.
void set_parallel(bool enabled);
bool parallel_enabled();
int max_threads();

BatchLossGrad nn_loss_grad(const NNParams& nn, const TrainSet& set,
                           std::span<const std::size_t> indices, double lambda);
double nn_loss(const NNParams& nn, const TrainSet& set, double lambda);
double mean_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

} // namespace hsmff::kernels
