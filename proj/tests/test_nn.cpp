#include <cmath>
#include <vector>

#include <doctest.h>

#include "hsmff/nn.hpp"

using namespace hsmff;

namespace {

// independent straightforward evaluation used as the oracle
double naive_forward(const NNParams& nn, const std::vector<double>& x) {
    double out = nn.b2;
    for (int i = 0; i < nn.n_hidden; ++i) {
        double z = nn.b1[static_cast<std::size_t>(i)];
        for (int j = 0; j < nn.n_in; ++j)
            z += nn.w1[static_cast<std::size_t>(i * nn.n_in + j)] *
                 x[static_cast<std::size_t>(j)];
        out += nn.w2[static_cast<std::size_t>(i)] * std::tanh(z);
    }
    return out;
}

NNParams random_nn(int n_in, int n_hidden, std::uint64_t seed) {
    NNParams nn = init_nn(n_in, n_hidden, seed);
    UniformRng rng(seed + 1);
    for (double& v : nn.w1) v = rng.next_in(-1.5, 1.5);
    for (double& v : nn.b1) v = rng.next_in(-1.0, 1.0);
    for (double& v : nn.w2) v = rng.next_in(-1.5, 1.5);
    nn.b2 = rng.next_in(-1.0, 1.0);
    return nn;
}

} // namespace

TEST_SUITE("nn") {

TEST_CASE("all-zero weights output the output bias") {
    NNParams nn = init_nn(3, 4, 1);
    std::fill(nn.w1.begin(), nn.w1.end(), 0.0);
    std::fill(nn.b1.begin(), nn.b1.end(), 0.0);
    std::fill(nn.w2.begin(), nn.w2.end(), 0.0);
    nn.b2 = 0.77;
    const std::vector<double> x = {1.0, -2.0, 3.0};
    CHECK(nn_forward(nn, x) == 0.77);
}

TEST_CASE("a single passthrough neuron reduces to tanh") {
    NNParams nn = init_nn(3, 1, 1);
    nn.w1 = {1.0, 0.0, 0.0};
    nn.b1 = {0.0};
    nn.w2 = {1.0};
    nn.b2 = 0.0;
    for (double v : {-2.0, -0.3, 0.0, 1.1}) {
        const std::vector<double> x = {v, 9.0, -9.0};
        CHECK(nn_forward(nn, x) == doctest::Approx(std::tanh(v)).epsilon(1e-15));
    }
}

TEST_CASE("forward pass matches an independent evaluation") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const NNParams nn = random_nn(5, 9, seed);
        UniformRng rng(seed * 31 + 7);
        std::vector<double> x(5);
        for (double& v : x) v = rng.next_in(-2.0, 2.0);
        const double got = nn_forward(nn, x);
        const double expected = naive_forward(nn, x);
        CHECK(std::abs(got - expected) < 1e-12 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("zero network has unit bias gradient only") {
    NNParams nn = init_nn(2, 3, 1);
    std::fill(nn.w1.begin(), nn.w1.end(), 0.0);
    std::fill(nn.b1.begin(), nn.b1.end(), 0.0);
    std::fill(nn.w2.begin(), nn.w2.end(), 0.0);
    nn.b2 = 0.0;

    NNGradient g;
    const std::vector<double> x = {0.0, 0.0};
    nn_gradient(nn, x, 1.0, g);
    CHECK(g.b2 == 1.0);
    for (double v : g.w1) CHECK(v == 0.0);
    for (double v : g.b1) CHECK(v == 0.0);
    for (double v : g.w2) CHECK(v == 0.0); // tanh(0) = 0
    for (double v : g.x) CHECK(v == 0.0);
}

TEST_CASE("input gradient of a linearized neuron is w2*w1") {
    NNParams nn = init_nn(1, 1, 1);
    nn.w1 = {0.7};
    nn.b1 = {0.0};
    nn.w2 = {1.3};
    nn.b2 = 0.0;
    NNGradient g;
    const std::vector<double> x = {0.0};
    nn_gradient(nn, x, 1.0, g);
    CHECK(g.x[0] == doctest::Approx(1.3 * 0.7).epsilon(1e-15)); // tanh'(0) = 1
}

TEST_CASE("backprop agrees with central finite differences") {
    const double h = 1e-6;
    double max_rel = 0.0;

    for (int draw = 0; draw < 100; ++draw) {
        const auto seed = static_cast<std::uint64_t>(100 + draw);
        NNParams nn = random_nn(4, 6, seed);
        UniformRng rng(seed * 131 + 3);
        std::vector<double> x(4);
        for (double& v : x) v = rng.next_in(-2.0, 2.0);

        NNGradient g;
        nn_gradient(nn, x, 1.0, g);

        const std::size_t n_par = nn.parameter_count();
        std::vector<double> theta(n_par), flat_grad(n_par);
        nn.to_flat(theta);
        std::size_t p = 0;
        for (double v : g.w1) flat_grad[p++] = v;
        for (double v : g.b1) flat_grad[p++] = v;
        for (double v : g.w2) flat_grad[p++] = v;
        flat_grad[p] = g.b2;

        NNParams probe = nn;
        for (std::size_t i = 0; i < n_par; ++i) {
            std::vector<double> t = theta;
            t[i] = theta[i] + h;
            probe.from_flat(t);
            const double up = nn_forward(probe, x);
            t[i] = theta[i] - h;
            probe.from_flat(t);
            const double dn = nn_forward(probe, x);
            const double fd = (up - dn) / (2.0 * h);
            const double rel = std::abs(flat_grad[i] - fd) /
                               std::max({1.0, std::abs(fd), std::abs(flat_grad[i])});
            max_rel = std::max(max_rel, rel);
        }

        // input gradient as well
        for (std::size_t j = 0; j < x.size(); ++j) {
            std::vector<double> xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const double fd = (nn_forward(nn, xp) - nn_forward(nn, xm)) / (2.0 * h);
            const double rel = std::abs(g.x[j] - fd) /
                               std::max({1.0, std::abs(fd), std::abs(g.x[j])});
            max_rel = std::max(max_rel, rel);
        }
    }
    CHECK(max_rel < 1e-6);
}

TEST_CASE("initialization is seeded and bounded by fan-in") {
    const NNParams a = init_nn(3, 16, 42);
    const NNParams b = init_nn(3, 16, 42);
    const NNParams c = init_nn(3, 16, 43);
    CHECK(a.w1 == b.w1);
    CHECK(a.b2 == b.b2);
    CHECK(a.w1 != c.w1);

    const double bound1 = 1.0 / std::sqrt(3.0);
    const double bound2 = 1.0 / std::sqrt(16.0);
    for (double v : a.w1) CHECK(std::abs(v) <= bound1);
    for (double v : a.w2) CHECK(std::abs(v) <= bound2);
}

} // TEST_SUITE
