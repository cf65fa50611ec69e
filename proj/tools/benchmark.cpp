// Times the serial reference kernels against the OpenMP ones on the three
// hot paths: batch loss/gradient evaluation, trace metrics, and batch
// feedforward evaluation. Also cross-checks that both paths agree
// bit-for-bit, which the fixed-block accumulation guarantees.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "hsmff/feedforward.hpp"
#include "hsmff/kernels.hpp"
#include "hsmff/model.hpp"
#include "hsmff/nn.hpp"
#include "hsmff/train.hpp"
#include "hsmff/trajectory.hpp"

using namespace hsmff;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        fn();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-22s serial %8.3f ms   openmp %8.3f ms   speedup %5.2fx   %s\n",
                name, serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                identical ? "bitwise-identical" : "MISMATCH");
}

} // namespace

int main() {
    std::printf("hsmff kernel benchmark (%d thread(s) available)\n", kernels::max_threads());

    // --- batch loss/gradient on a training-sized problem ---
    const std::size_t n_samples = 200000;
    kernels::TrainSet set;
    set.n_in = 3;
    set.count = n_samples;
    set.x.resize(n_samples * 3);
    set.target.resize(n_samples);
    UniformRng rng(42);
    for (double& v : set.x) v = rng.next_in(-1.0, 1.0);
    for (std::size_t i = 0; i < n_samples; ++i)
        set.target[i] = 0.05 * std::sin(6.0 * set.x[3 * i]) + 0.01 * set.x[3 * i + 1];

    const NNParams nn = init_nn(3, 16, 7);

    kernels::BatchLossGrad ser, par;
    const double t_grad_s = time_best_of(3, [&] { ser = kernels::serial::nn_loss_grad(nn, set, {}, 0.0); });
    const double t_grad_p = time_best_of(3, [&] { par = kernels::parallel::nn_loss_grad(nn, set, {}, 0.0); });
    const bool grad_same = ser.loss == par.loss &&
                           std::memcmp(ser.grad.data(), par.grad.data(),
                                       ser.grad.size() * sizeof(double)) == 0;
    report("nn_loss_grad (200k)", t_grad_s, t_grad_p, grad_same);

    // --- trace metrics ---
    std::vector<double> a(2000000), b(2000000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::sin(1e-3 * static_cast<double>(i));
        b[i] = a[i] + 1e-4 * std::cos(1e-3 * static_cast<double>(i));
    }
    double mae_s = 0, mae_p = 0;
    const double t_mae_s = time_best_of(5, [&] { mae_s = kernels::serial::mean_abs_diff(a, b); });
    const double t_mae_p = time_best_of(5, [&] { mae_p = kernels::parallel::mean_abs_diff(a, b); });
    report("mean_abs_diff (2M)", t_mae_s, t_mae_p, mae_s == mae_p);

    // --- batch feedforward over a long profile ---
    MotionLimits limits;
    const ReferenceProfile profile = back_and_forth(3, limits, 1e-4, 0.2, 2);

    InverseModel model;
    model.kind = ModelKind::pgnn;
    model.regressor = RegressorSpec{};
    model.physical = {5.7e-5, 2.0e-3};
    model.transform = TransformTag::physics_guided;
    model.nn = init_nn(3, 16, 3);
    model.feature_scale = {80.0, 15.0, 6.283};

    std::vector<double> ff_s, ff_p;
    kernels::set_parallel(false);
    const double t_ff_s = time_best_of(3, [&] { ff_s = ff_trace(model, profile); });
    kernels::set_parallel(true);
    const double t_ff_p = time_best_of(3, [&] { ff_p = ff_trace(model, profile); });
    const bool ff_same = std::memcmp(ff_s.data(), ff_p.data(), ff_s.size() * sizeof(double)) == 0;
    report("ff_trace (pgnn)", t_ff_s, t_ff_p, ff_same);

    return (grad_same && mae_s == mae_p && ff_same) ? 0 : 1;
}
