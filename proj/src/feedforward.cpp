#include "hsmff/feedforward.hpp"

#include <algorithm>

#include "hsmff/errors.hpp"
#include "hsmff/kernels.hpp"

namespace hsmff {

FeedforwardEvaluator::FeedforwardEvaluator(const InverseModel& model,
                                           const ReferenceProfile& profile)
    : model_(model), profile_(profile) {
    model_.validate();
    phi_.resize(static_cast<std::size_t>(model_.regressor.length()));
    past_u_ff_.assign(static_cast<std::size_t>(model_.regressor.input_entries()), 0.0);
}

void FeedforwardEvaluator::reset() {
    std::fill(past_u_ff_.begin(), past_u_ff_.end(), 0.0);
    max_index_accessed_ = -1;
}

double FeedforwardEvaluator::step(std::size_t k) {
    if (k >= profile_.size())
        throw LookaheadUnavailable("feedforward sample " + std::to_string(k) +
                                   " beyond profile of " + std::to_string(profile_.size()));

    const RegressorSpec& spec = model_.regressor;
    const auto kk = static_cast<std::ptrdiff_t>(k);
    for (int i = 0; i <= spec.n_a; ++i) {
        const std::ptrdiff_t idx = kk + spec.n_k + 1 - i;
        max_index_accessed_ = std::max(max_index_accessed_, idx);
        phi_[static_cast<std::size_t>(i)] = profile_.at(idx);
    }
    for (int i = 0; i < spec.input_entries(); ++i)
        phi_[static_cast<std::size_t>(spec.position_entries() + i)] =
            past_u_ff_[static_cast<std::size_t>(i)];

    const double u = model_.predict(phi_);

    if (!past_u_ff_.empty()) {
        for (std::size_t i = past_u_ff_.size() - 1; i > 0; --i)
            past_u_ff_[i] = past_u_ff_[i - 1];
        past_u_ff_[0] = u;
    }
    return u;
}

namespace {

struct FfBatchCtx {
    const InverseModel* model;
    const ReferenceProfile* profile;
    double* out;
};

void ff_batch_eval(void* vctx, std::size_t k) {
    auto* ctx = static_cast<FfBatchCtx*>(vctx);
    const RegressorSpec& spec = ctx->model->regressor;
    double phi[16];
    const auto kk = static_cast<std::ptrdiff_t>(k);
    for (int i = 0; i <= spec.n_a; ++i)
        phi[i] = ctx->profile->at(kk + spec.n_k + 1 - i);
    ctx->out[k] = ctx->model->predict({phi, static_cast<std::size_t>(spec.length())});
}

} // namespace

std::vector<double> ff_trace(const InverseModel& model, const ReferenceProfile& profile) {
    model.validate();
    std::vector<double> out(profile.size(), 0.0);

    if (model.regressor.input_entries() == 0 && model.regressor.length() <= 16) {
        FfBatchCtx ctx{&model, &profile, out.data()};
        if (kernels::parallel_enabled())
            kernels::parallel::for_each_index(out.size(), &ctx, ff_batch_eval);
        else
            for (std::size_t k = 0; k < out.size(); ++k) ff_batch_eval(&ctx, k);
    } else {
        FeedforwardEvaluator eval(model, profile);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = eval.step(k);
    }
    return out;
}

} // namespace hsmff
