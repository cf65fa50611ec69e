#pragma once

#include <cstddef>
#include <vector>

#include "hsmff/model.hpp"
#include "hsmff/sim.hpp"
#include "hsmff/trajectory.hpp"

namespace hsmff {

// Evaluates an inverse model as a causal feedforward law over a reference
// profile: u_ff(k) = u_hat(theta, phi_ff(k)) with phi_ff built from reference
// samples up to index k + n_k + 1 (and buffered past u_ff values when
// n_b > 1). One evaluator per simulation run; the u_ff buffer makes it
// stateful for n_b > 1, stateless at the defaults.
class FeedforwardEvaluator : public FeedforwardSource {
public:
    FeedforwardEvaluator(const InverseModel& model, const ReferenceProfile& profile);

    // u_ff at sample k; throws LookaheadUnavailable for k outside the profile.
    double step(std::size_t k);

    double feedforward(std::size_t k) override { return step(k); }

    // highest reference index requested so far (causality audit)
    std::ptrdiff_t max_index_accessed() const { return max_index_accessed_; }

    const InverseModel& model() const { return model_; }
    const ReferenceProfile& profile() const { return profile_; }

    void reset();

private:
    const InverseModel& model_;
    const ReferenceProfile& profile_;
    std::vector<double> phi_;
    std::vector<double> past_u_ff_; // u_ff(k-1), ..., u_ff(k-n_b+1)
    std::ptrdiff_t max_index_accessed_ = -1;
};

// u_ff over every sample of the profile. Pure given model and profile; with
// no u_ff recursion (n_b <= 1) the samples are independent and evaluated by
// the parallel kernel, otherwise sequentially through the buffer.
std::vector<double> ff_trace(const InverseModel& model, const ReferenceProfile& profile);

} // namespace hsmff
