#include "hsmff/nn.hpp"

#include <cmath>

#include "hsmff/errors.hpp"

namespace hsmff {

void NNParams::validate() const {
    if (n_in < 1 || n_hidden < 1)
        throw Error("nn: layer sizes must be >= 1");
    if (w1.size() != static_cast<std::size_t>(n_hidden) * n_in ||
        b1.size() != static_cast<std::size_t>(n_hidden) ||
        w2.size() != static_cast<std::size_t>(n_hidden))
        throw Error("nn: inconsistent parameter dimensions");
}

void NNParams::to_flat(std::span<double> out) const {
    std::size_t p = 0;
    for (double v : w1) out[p++] = v;
    for (double v : b1) out[p++] = v;
    for (double v : w2) out[p++] = v;
    out[p] = b2;
}

void NNParams::from_flat(std::span<const double> in) {
    std::size_t p = 0;
    for (double& v : w1) v = in[p++];
    for (double& v : b1) v = in[p++];
    for (double& v : w2) v = in[p++];
    b2 = in[p];
}

void NNGradient::resize(const NNParams& nn) {
    w1.assign(nn.w1.size(), 0.0);
    b1.assign(nn.b1.size(), 0.0);
    w2.assign(nn.w2.size(), 0.0);
    b2 = 0.0;
    x.assign(static_cast<std::size_t>(nn.n_in), 0.0);
}

void NNGradient::zero() {
    std::fill(w1.begin(), w1.end(), 0.0);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(w2.begin(), w2.end(), 0.0);
    b2 = 0.0;
    std::fill(x.begin(), x.end(), 0.0);
}

std::uint64_t UniformRng::next_below(std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = ~0ull - (~0ull % n + 1) % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v > limit);
    return v % n;
}

NNParams init_nn(int n_in, int n_hidden, std::uint64_t seed) {
    NNParams nn;
    nn.n_in = n_in;
    nn.n_hidden = n_hidden;
    nn.w1.resize(static_cast<std::size_t>(n_hidden) * n_in);
    nn.b1.resize(static_cast<std::size_t>(n_hidden));
    nn.w2.resize(static_cast<std::size_t>(n_hidden));
    nn.validate();

    UniformRng rng(seed);
    const double a1 = 1.0 / std::sqrt(static_cast<double>(n_in));
    const double a2 = 1.0 / std::sqrt(static_cast<double>(n_hidden));
    for (double& v : nn.w1) v = rng.next_in(-a1, a1);
    for (double& v : nn.b1) v = rng.next_in(-a1, a1);
    for (double& v : nn.w2) v = rng.next_in(-a2, a2);
    nn.b2 = rng.next_in(-a2, a2);
    return nn;
}

double nn_forward(const NNParams& nn, std::span<const double> x) {
    double out = nn.b2;
    const double* w1 = nn.w1.data();
    for (int i = 0; i < nn.n_hidden; ++i) {
        double z = nn.b1[static_cast<std::size_t>(i)];
        const double* row = w1 + static_cast<std::size_t>(i) * nn.n_in;
        for (int j = 0; j < nn.n_in; ++j) z += row[j] * x[static_cast<std::size_t>(j)];
        out += nn.w2[static_cast<std::size_t>(i)] * std::tanh(z);
    }
    return out;
}

void nn_gradient(const NNParams& nn, std::span<const double> x, double upstream,
                 NNGradient& out) {
    if (out.w1.size() != nn.w1.size()) out.resize(nn);
    out.zero();

    const double* w1 = nn.w1.data();
    for (int i = 0; i < nn.n_hidden; ++i) {
        double z = nn.b1[static_cast<std::size_t>(i)];
        const double* row = w1 + static_cast<std::size_t>(i) * nn.n_in;
        for (int j = 0; j < nn.n_in; ++j) z += row[j] * x[static_cast<std::size_t>(j)];
        const double h = std::tanh(z);
        out.w2[static_cast<std::size_t>(i)] = upstream * h;
        // d tanh / dz = 1 - h^2
        const double s = upstream * nn.w2[static_cast<std::size_t>(i)] * (1.0 - h * h);
        out.b1[static_cast<std::size_t>(i)] = s;
        double* grow = out.w1.data() + static_cast<std::size_t>(i) * nn.n_in;
        for (int j = 0; j < nn.n_in; ++j) {
            grow[j] = s * x[static_cast<std::size_t>(j)];
            out.x[static_cast<std::size_t>(j)] += s * row[j];
        }
    }
    out.b2 = upstream;
}

} // namespace hsmff
