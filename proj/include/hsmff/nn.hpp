#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hsmff {

// Single-hidden-layer tanh network mapping R^n_in -> R:
//   out = w2 . tanh(W1 x + b1) + b2.
struct NNParams {
    int n_in = 0;
    int n_hidden = 0;
    std::vector<double> w1; // n_hidden x n_in, row-major
    std::vector<double> b1; // n_hidden
    std::vector<double> w2; // n_hidden
    double b2 = 0.0;

    std::size_t parameter_count() const {
        return w1.size() + b1.size() + w2.size() + 1;
    }
    void validate() const;

    // flat parameter vector layout [w1, b1, w2, b2], shared with gradients
    void to_flat(std::span<double> out) const;
    void from_flat(std::span<const double> in);
};

// Gradient of (upstream * output) with respect to every parameter and the
// input.
struct NNGradient {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
    std::vector<double> x;

    void resize(const NNParams& nn);
    void zero();
};

// Seeded uniform init in [-a, a] with a = 1/sqrt(fan_in). The generator is
// consumed in a fixed order, so identical seeds give identical parameters.
NNParams init_nn(int n_in, int n_hidden, std::uint64_t seed);

double nn_forward(const NNParams& nn, std::span<const double> x);

void nn_gradient(const NNParams& nn, std::span<const double> x, double upstream,
                 NNGradient& out);

// Portable uniform double in [0, 1) from a 64-bit state; avoids the
// implementation-defined std distributions.
class UniformRng {
public:
    explicit UniformRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // xorshift64*
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
    // unbiased integer in [0, n)
    std::uint64_t next_below(std::uint64_t n);

private:
    std::uint64_t state_;
};

} // namespace hsmff
