#include <cmath>
#include <cstring>
#include <vector>

#include <doctest.h>

#include "hsmff/errors.hpp"
#include "hsmff/kernels.hpp"
#include "hsmff/nn.hpp"

using namespace hsmff;

namespace {

kernels::TrainSet random_set(std::size_t count, int n_in, std::uint64_t seed) {
    kernels::TrainSet set;
    set.n_in = n_in;
    set.count = count;
    set.x.resize(count * static_cast<std::size_t>(n_in));
    set.target.resize(count);
    UniformRng rng(seed);
    for (double& v : set.x) v = rng.next_in(-1.0, 1.0);
    for (double& v : set.target) v = rng.next_in(-0.5, 0.5);
    return set;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel loss gradients agree bit for bit") {
    // sizes straddle the block width, including a non-multiple remainder
    for (const std::size_t count : {100ul, 4096ul, 9000ul, 20000ul}) {
        const kernels::TrainSet set = random_set(count, 3, count);
        const NNParams nn = init_nn(3, 8, 5);
        const auto s = kernels::serial::nn_loss_grad(nn, set, {}, 0.01);
        const auto p = kernels::parallel::nn_loss_grad(nn, set, {}, 0.01);
        CHECK(s.loss == p.loss);
        CHECK(bitwise_equal(s.grad, p.grad));
    }
}

TEST_CASE("serial and parallel metrics agree bit for bit") {
    const std::size_t n = 50000;
    std::vector<double> a(n), b(n);
    UniformRng rng(3);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.next_in(-2.0, 2.0);
        b[i] = a[i] + rng.next_in(-1e-3, 1e-3);
    }
    CHECK(kernels::serial::mean_abs_diff(a, b) == kernels::parallel::mean_abs_diff(a, b));
    CHECK(kernels::serial::max_abs_diff(a, b) == kernels::parallel::max_abs_diff(a, b));
}

TEST_CASE("loss gradient matches the per-sample backprop sum") {
    const kernels::TrainSet set = random_set(257, 4, 9);
    NNParams nn = init_nn(4, 5, 11);
    const double lambda = 0.02;

    const auto got = kernels::serial::nn_loss_grad(nn, set, {}, lambda);

    // independent accumulation through the single-sample gradient
    const std::size_t n_par = nn.parameter_count();
    std::vector<double> expected(n_par, 0.0);
    double loss = 0.0;
    NNGradient g;
    for (std::size_t i = 0; i < set.count; ++i) {
        const auto x = set.row(i);
        const double e = nn_forward(nn, x) - set.target[i];
        loss += e * e;
        nn_gradient(nn, x, 2.0 * e / static_cast<double>(set.count), g);
        std::size_t p = 0;
        for (double v : g.w1) expected[p++] += v;
        for (double v : g.b1) expected[p++] += v;
        for (double v : g.w2) expected[p++] += v;
        expected[p] += g.b2;
    }
    loss /= static_cast<double>(set.count);
    std::vector<double> theta(n_par);
    nn.to_flat(theta);
    for (std::size_t p = 0; p < n_par; ++p) {
        loss += lambda * lambda * theta[p] * theta[p];
        expected[p] += 2.0 * lambda * lambda * theta[p];
    }

    CHECK(std::abs(got.loss - loss) < 1e-12 * (1.0 + loss));
    for (std::size_t p = 0; p < n_par; ++p)
        CHECK(std::abs(got.grad[p] - expected[p]) < 1e-10 * (1.0 + std::abs(expected[p])));
}

TEST_CASE("subset indices select the right samples") {
    const kernels::TrainSet set = random_set(50, 2, 21);
    const NNParams nn = init_nn(2, 3, 2);
    std::vector<std::size_t> idx = {4, 9, 13, 22, 49};

    const auto got = kernels::serial::nn_loss_grad(nn, set, idx, 0.0);

    double loss = 0.0;
    for (std::size_t i : idx) {
        const double e = nn_forward(nn, set.row(i)) - set.target[i];
        loss += e * e;
    }
    loss /= static_cast<double>(idx.size());
    CHECK(got.loss == doctest::Approx(loss).epsilon(1e-13));
}

TEST_CASE("metrics compute means and maxima") {
    const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> b = {1.5, 2.0, 2.0, 5.0};
    CHECK(kernels::mean_abs_diff(a, b) == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(kernels::max_abs_diff(a, b) == 1.0);

    const std::vector<double> empty;
    CHECK_THROWS_AS(kernels::mean_abs_diff(empty, empty), EmptyTrace);
}

TEST_CASE("loss alone matches the loss from the gradient pass") {
    const kernels::TrainSet set = random_set(6000, 3, 77);
    const NNParams nn = init_nn(3, 6, 4);
    const auto lg = kernels::parallel::nn_loss_grad(nn, set, {}, 0.005);
    const double l = kernels::parallel::nn_loss(nn, set, 0.005);
    CHECK(l == lg.loss);
}

} // TEST_SUITE
