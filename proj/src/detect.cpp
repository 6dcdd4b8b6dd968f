#include "dualobs/detect.hpp"

#include "dualobs/error.hpp"

#include <cmath>

namespace dualobs {

ThresholdPolicy::ThresholdPolicy(double t, std::string name) : lr_threshold(t), label(std::move(name))
{
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("likelihood-ratio threshold must be positive and finite");
}

double ThresholdPolicy::log2_threshold() const { return std::log2(lr_threshold); }

DetectorState central_update(DetectorState state, ObservationPair obs, const JointModel& model)
{
    state.log_lr += model.joint_llr()[model.index(obs.y, obs.z)];
    ++state.n;
    return state;
}

DetectorState local_update(DetectorState state, std::size_t obs_index, const JointModel& model)
{
    if (state.scope == Scope::Central) throw DomainError("local_update on a central detector");
    const Observer o = state.scope == Scope::Observer1 ? Observer::One : Observer::Two;
    const auto llr = model.marginal_llr(o);
    if (obs_index >= llr.size()) throw DomainError("observation index out of range");
    state.log_lr += llr[obs_index];
    ++state.n;
    return state;
}

bool decide_log2(double log_lr, double log2_threshold) { return log_lr >= log2_threshold - kTieTolerance; }

Hypothesis decide(const DetectorState& state, const ThresholdPolicy& policy)
{
    return hypothesis_from(decide_log2(state.log_lr, policy.log2_threshold()));
}

double posterior_from_log_lr(double log_lr, Prior prior)
{
    // logit(psi) = ln(p1/p0) + log_lr * ln 2
    const double logit = std::log(prior.p1 / prior.p0) + log_lr * std::log(2.0);
    if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
    const double e = std::exp(logit);
    return e / (1.0 + e);
}

double posterior(const DetectorState& state, Prior prior) { return posterior_from_log_lr(state.log_lr, prior); }

double posterior_threshold_to_lr(double t, Prior prior)
{
    if (!(t > 0.0 && t < 1.0)) throw DomainError("posterior threshold must lie in (0, 1)");
    return t * prior.p0 / (prior.p1 * (1.0 - t));
}

SprtPolicy::SprtPolicy(double a, double b) : lower(a), upper(b)
{
    if (!(a > 0.0 && a < b) || !std::isfinite(b)) throw DomainError("SPRT boundaries must satisfy 0 < A < B");
}

SprtPolicy SprtPolicy::from_error_targets(double alpha, double beta)
{
    if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0 && alpha + beta < 1.0)) {
        throw DomainError("SPRT error targets must be in (0,1) with alpha + beta < 1");
    }
    return SprtPolicy(beta / (1.0 - alpha), (1.0 - beta) / alpha);
}

SprtOutcome sprt_step(const DetectorState& state, const SprtPolicy& policy)
{
    if (decide_log2(state.log_lr, std::log2(policy.upper))) return SprtOutcome::Decide1;
    if (state.log_lr <= std::log2(policy.lower) + kTieTolerance) return SprtOutcome::Decide0;
    return SprtOutcome::Continue;
}

SprtRun run_sprt(const JointModel& model, const JointSampler& sampler, const SprtPolicy& policy,
                 std::size_t max_samples, Hypothesis truth, Rng& rng)
{
    if (max_samples == 0) throw ConfigError("SPRT sample cap must be at least 1");
    DetectorState state{0.0, 0, Scope::Central};
    while (state.n < max_samples) {
        state = central_update(state, sampler.draw(truth, rng), model);
        switch (sprt_step(state, policy)) {
        case SprtOutcome::Decide1: return {Hypothesis::H1, state.n, false};
        case SprtOutcome::Decide0: return {Hypothesis::H0, state.n, false};
        case SprtOutcome::Continue: break;
        }
    }
    return {hypothesis_from(posterior(state, model.prior()) >= 0.5), state.n, true};
}

}  // namespace dualobs
