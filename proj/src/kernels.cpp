#include "hsmff/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hsmff/errors.hpp"

namespace hsmff::kernels {

namespace {

#ifdef _OPENMP
std::atomic<bool> g_parallel{true};
#else
std::atomic<bool> g_parallel{false};
#endif

inline std::size_t block_count(std::size_t n) {
    return (n + block_size - 1) / block_size;
}

// Per-block squared-error sum and gradient accumulation. Identical inner
// loop for the serial and OpenMP paths.
void loss_grad_block(const NNParams& nn, const TrainSet& set,
                     std::span<const std::size_t> indices, std::size_t begin,
                     std::size_t end, double* grad, double* sq_sum) {
    const int n_in = nn.n_in;
    const int n_h = nn.n_hidden;
    const double* w1 = nn.w1.data();
    const double* b1 = nn.b1.data();
    const double* w2 = nn.w2.data();
    double* gw1 = grad;
    double* gb1 = grad + static_cast<std::size_t>(n_h) * n_in;
    double* gw2 = gb1 + n_h;
    double* gb2 = gw2 + n_h;

    double local_sq = 0.0;
    double h[1024]; // n_hidden is small everywhere in this project
    for (std::size_t p = begin; p < end; ++p) {
        const std::size_t i = indices.empty() ? p : indices[p];
        const double* x = set.x.data() + i * static_cast<std::size_t>(n_in);

        double out = nn.b2;
        for (int r = 0; r < n_h; ++r) {
            double z = b1[r];
            const double* row = w1 + static_cast<std::size_t>(r) * n_in;
            for (int c = 0; c < n_in; ++c) z += row[c] * x[c];
            h[r] = std::tanh(z);
            out += w2[r] * h[r];
        }
        const double e = out - set.target[i];
        local_sq += e * e;

        // d(e^2)/d(theta); the 1/N factor is applied when blocks are folded
        const double up = 2.0 * e;
        for (int r = 0; r < n_h; ++r) {
            gw2[r] += up * h[r];
            const double s = up * w2[r] * (1.0 - h[r] * h[r]);
            gb1[r] += s;
            double* grow = gw1 + static_cast<std::size_t>(r) * n_in;
            for (int c = 0; c < n_in; ++c) grow[c] += s * x[c];
        }
        *gb2 += up;
    }
    *sq_sum = local_sq;
}

double loss_block(const NNParams& nn, const TrainSet& set, std::size_t begin,
                  std::size_t end) {
    const int n_in = nn.n_in;
    const int n_h = nn.n_hidden;
    const double* w1 = nn.w1.data();
    double local_sq = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double* x = set.x.data() + i * static_cast<std::size_t>(n_in);
        double out = nn.b2;
        for (int r = 0; r < n_h; ++r) {
            double z = nn.b1[static_cast<std::size_t>(r)];
            const double* row = w1 + static_cast<std::size_t>(r) * n_in;
            for (int c = 0; c < n_in; ++c) z += row[c] * x[c];
            out += nn.w2[static_cast<std::size_t>(r)] * std::tanh(z);
        }
        const double e = out - set.target[i];
        local_sq += e * e;
    }
    return local_sq;
}

// Folds per-block results in block order and applies 1/N plus the
// regularization penalty.
BatchLossGrad fold_loss_grad(const NNParams& nn, std::size_t n_samples,
                             std::size_t n_blocks, const std::vector<double>& block_grad,
                             const std::vector<double>& block_sq, double lambda) {
    const std::size_t n_par = nn.parameter_count();
    BatchLossGrad out;
    out.grad.assign(n_par, 0.0);

    double sq = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        sq += block_sq[b];
        const double* g = block_grad.data() + b * n_par;
        for (std::size_t p = 0; p < n_par; ++p) out.grad[p] += g[p];
    }
    const double inv_n = 1.0 / static_cast<double>(n_samples);
    for (double& g : out.grad) g *= inv_n;
    out.loss = sq * inv_n;

    if (lambda != 0.0) {
        const double l2 = lambda * lambda;
        std::vector<double> theta(n_par);
        nn.to_flat(theta);
        double penalty = 0.0;
        for (std::size_t p = 0; p < n_par; ++p) {
            penalty += l2 * theta[p] * theta[p];
            out.grad[p] += 2.0 * l2 * theta[p];
        }
        out.loss += penalty;
    }
    return out;
}

template <bool Parallel>
BatchLossGrad nn_loss_grad_impl(const NNParams& nn, const TrainSet& set,
                                std::span<const std::size_t> indices, double lambda) {
    nn.validate();
    if (nn.n_hidden > 1024) throw Error("nn_loss_grad: hidden layer wider than 1024");
    const std::size_t n = indices.empty() ? set.count : indices.size();
    if (n == 0) throw Error("nn_loss_grad: empty sample set");

    const std::size_t n_par = nn.parameter_count();
    const std::size_t n_blocks = block_count(n);
    std::vector<double> block_grad(n_blocks * n_par, 0.0);
    std::vector<double> block_sq(n_blocks, 0.0);

    if constexpr (Parallel) {
        // a single block would only pay the fork/join cost
        if (n_blocks > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_blocks); ++b) {
                const std::size_t begin = static_cast<std::size_t>(b) * block_size;
                const std::size_t end = std::min(n, begin + block_size);
                loss_grad_block(nn, set, indices, begin, end,
                                block_grad.data() + static_cast<std::size_t>(b) * n_par,
                                &block_sq[static_cast<std::size_t>(b)]);
            }
        } else {
            loss_grad_block(nn, set, indices, 0, n, block_grad.data(), &block_sq[0]);
        }
    } else {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            const std::size_t begin = b * block_size;
            const std::size_t end = std::min(n, begin + block_size);
            loss_grad_block(nn, set, indices, begin, end, block_grad.data() + b * n_par,
                            &block_sq[b]);
        }
    }
    return fold_loss_grad(nn, n, n_blocks, block_grad, block_sq, lambda);
}

template <bool Parallel>
double nn_loss_impl(const NNParams& nn, const TrainSet& set, double lambda) {
    nn.validate();
    if (set.count == 0) throw Error("nn_loss: empty sample set");
    const std::size_t n_blocks = block_count(set.count);
    std::vector<double> block_sq(n_blocks, 0.0);

    if constexpr (Parallel) {
        if (n_blocks > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_blocks); ++b) {
                const std::size_t begin = static_cast<std::size_t>(b) * block_size;
                const std::size_t end = std::min(set.count, begin + block_size);
                block_sq[static_cast<std::size_t>(b)] = loss_block(nn, set, begin, end);
            }
        } else {
            block_sq[0] = loss_block(nn, set, 0, set.count);
        }
    } else {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            const std::size_t begin = b * block_size;
            const std::size_t end = std::min(set.count, begin + block_size);
            block_sq[b] = loss_block(nn, set, begin, end);
        }
    }

    double sq = 0.0;
    for (double v : block_sq) sq += v;
    double loss = sq / static_cast<double>(set.count);
    if (lambda != 0.0) {
        std::vector<double> theta(nn.parameter_count());
        nn.to_flat(theta);
        double penalty = 0.0;
        for (double t : theta) penalty += lambda * lambda * t * t;
        loss += penalty;
    }
    return loss;
}

inline double sum_abs_block(std::span<const double> a, std::span<const double> b,
                            std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

inline double max_abs_block(std::span<const double> a, std::span<const double> b,
                            std::size_t begin, std::size_t end) {
    double m = 0.0;
    for (std::size_t i = begin; i < end; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <bool Parallel>
double mean_abs_diff_impl(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("mean_abs_diff: length mismatch");
    if (a.empty()) throw EmptyTrace("mean_abs_diff: empty input");
    const std::size_t n_blocks = block_count(a.size());
    std::vector<double> block_sum(n_blocks, 0.0);

    if constexpr (Parallel) {
        if (n_blocks > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(n_blocks); ++blk) {
                const std::size_t begin = static_cast<std::size_t>(blk) * block_size;
                block_sum[static_cast<std::size_t>(blk)] =
                    sum_abs_block(a, b, begin, std::min(a.size(), begin + block_size));
            }
        } else {
            block_sum[0] = sum_abs_block(a, b, 0, a.size());
        }
    } else {
        for (std::size_t blk = 0; blk < n_blocks; ++blk) {
            const std::size_t begin = blk * block_size;
            block_sum[blk] = sum_abs_block(a, b, begin, std::min(a.size(), begin + block_size));
        }
    }

    double total = 0.0;
    for (double v : block_sum) total += v;
    return total / static_cast<double>(a.size());
}

template <bool Parallel>
double max_abs_diff_impl(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("max_abs_diff: length mismatch");
    if (a.empty()) throw EmptyTrace("max_abs_diff: empty input");
    const std::size_t n_blocks = block_count(a.size());
    std::vector<double> block_max(n_blocks, 0.0);

    if constexpr (Parallel) {
        if (n_blocks > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(n_blocks); ++blk) {
                const std::size_t begin = static_cast<std::size_t>(blk) * block_size;
                block_max[static_cast<std::size_t>(blk)] =
                    max_abs_block(a, b, begin, std::min(a.size(), begin + block_size));
            }
        } else {
            block_max[0] = max_abs_block(a, b, 0, a.size());
        }
    } else {
        for (std::size_t blk = 0; blk < n_blocks; ++blk) {
            const std::size_t begin = blk * block_size;
            block_max[blk] = max_abs_block(a, b, begin, std::min(a.size(), begin + block_size));
        }
    }

    double m = 0.0;
    for (double v : block_max) m = std::max(m, v);
    return m;
}

} // namespace

namespace serial {

BatchLossGrad nn_loss_grad(const NNParams& nn, const TrainSet& set,
                           std::span<const std::size_t> indices, double lambda) {
    return nn_loss_grad_impl<false>(nn, set, indices, lambda);
}
double nn_loss(const NNParams& nn, const TrainSet& set, double lambda) {
    return nn_loss_impl<false>(nn, set, lambda);
}
double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
    return mean_abs_diff_impl<false>(a, b);
}
double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return max_abs_diff_impl<false>(a, b);
}

} // namespace serial

namespace parallel {

BatchLossGrad nn_loss_grad(const NNParams& nn, const TrainSet& set,
                           std::span<const std::size_t> indices, double lambda) {
    return nn_loss_grad_impl<true>(nn, set, indices, lambda);
}
double nn_loss(const NNParams& nn, const TrainSet& set, double lambda) {
    return nn_loss_impl<true>(nn, set, lambda);
}
double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
    return mean_abs_diff_impl<true>(a, b);
}
double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return max_abs_diff_impl<true>(a, b);
}

void for_each_index(std::size_t n, void* ctx, void (*fn)(void* ctx, std::size_t i)) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        fn(ctx, static_cast<std::size_t>(i));
}

} // namespace parallel

void set_parallel(bool enabled) { g_parallel.store(enabled); }

bool parallel_enabled() { return g_parallel.load(); }

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

BatchLossGrad nn_loss_grad(const NNParams& nn, const TrainSet& set,
                           std::span<const std::size_t> indices, double lambda) {
    return parallel_enabled() ? parallel::nn_loss_grad(nn, set, indices, lambda)
                              : serial::nn_loss_grad(nn, set, indices, lambda);
}
double nn_loss(const NNParams& nn, const TrainSet& set, double lambda) {
    return parallel_enabled() ? parallel::nn_loss(nn, set, lambda)
                              : serial::nn_loss(nn, set, lambda);
}
double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
    return parallel_enabled() ? parallel::mean_abs_diff(a, b) : serial::mean_abs_diff(a, b);
}
double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return parallel_enabled() ? parallel::max_abs_diff(a, b) : serial::max_abs_diff(a, b);
}

} // namespace hsmff::kernels
