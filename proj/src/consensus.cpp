#include "dualobs/consensus.hpp"

#include "dualobs/detect.hpp"
#include "dualobs/error.hpp"

#include <cmath>

namespace dualobs {

const char* scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::Basic: return "basic";
    case Scheme::Aggregated: return "aggregated";
    case Scheme::AccuracyExchange: return "accuracy_exchange";
    }
    return "basic";
}

void check_config(const ConsensusConfig& config)
{
    if (config.max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
    if (!(config.t1 > 0.0) || !(config.t2 > 0.0) || !std::isfinite(config.t1) || !std::isfinite(config.t2)) {
        throw ConfigError("thresholds T1, T2 must be positive and finite");
    }
    if (config.scheme != Scheme::Basic) {
        if (!(config.t3 > 0.0 && config.t3 < 1.0) || !(config.t4 > 0.0 && config.t4 < 1.0)) {
            throw ConfigError("thresholds T3, T4 must lie in (0, 1)");
        }
    }
}

namespace {

Hypothesis draw_truth(const JointModel& model, Rng& rng) { return hypothesis_from(rng.bernoulli(model.prior().p1)); }

// Lock-step rounds shared by all schemes. `on_disagreement(record, n)` runs
// the scheme's extra sub-steps after a D-disagreement and returns the agreed
// updated decision, or -1 to continue.
template <typename OnDisagreement>
ConsensusTrace run_rounds(const JointModel& model, const ConsensusConfig& config, Scheme scheme, Hypothesis truth,
                          Rng& rng, OnDisagreement&& on_disagreement)
{
    check_config(config);
    ConsensusTrace trace;
    trace.scheme = scheme;
    trace.true_h = truth;
    const JointSampler sampler(model);
    const double log2_t1 = std::log2(config.t1);
    const double log2_t2 = std::log2(config.t2);
    const auto llr1 = model.marginal_llr(Observer::One);
    const auto llr2 = model.marginal_llr(Observer::Two);
    double l1 = 0.0;
    double l2 = 0.0;

    for (std::size_t n = 1; n <= config.max_rounds; ++n) {
        RoundRecord rec;
        rec.round = n;
        rec.obs = sampler.draw(truth, rng);
        l1 += llr1[rec.obs.y];
        l2 += llr2[rec.obs.z];
        rec.d1 = decide_log2(l1, log2_t1) ? 1 : 0;
        rec.d2 = decide_log2(l2, log2_t2) ? 1 : 0;
        trace.rounds_run = n;
        trace.bits_exchanged += 2;
        if (config.record_rounds) {
            trace.messages.push_back({n, Observer::One, MessageKind::Decision, rec.d1, 0.0});
            trace.messages.push_back({n, Observer::Two, MessageKind::Decision, rec.d2, 0.0});
        }

        int agreed = -1;
        if (rec.d1 == rec.d2) {
            agreed = rec.d1;
        } else {
            try {
                agreed = on_disagreement(rec, n, trace);
            } catch (const BetaUndefined& e) {
                trace.aborted = true;
                trace.abort_reason = e.what();
                if (config.record_rounds) trace.rounds.push_back(rec);
                return trace;
            }
        }
        if (agreed >= 0) {
            rec.stopped = true;
            trace.stopping_time = n;
            trace.final_decision = hypothesis_from(agreed == 1);
        }
        if (config.record_rounds) trace.rounds.push_back(rec);
        if (agreed >= 0) return trace;
    }
    return trace;
}

void record_updated_decisions(RoundRecord& rec, std::size_t n, int o1, int o2, const ConsensusConfig& config,
                              ConsensusTrace& trace)
{
    rec.o1 = o1;
    rec.o2 = o2;
    trace.bits_exchanged += 2;
    if (config.record_rounds) {
        trace.messages.push_back({n, Observer::One, MessageKind::UpdatedDecision, o1, 0.0});
        trace.messages.push_back({n, Observer::Two, MessageKind::UpdatedDecision, o2, 0.0});
    }
}

}  // namespace

ConsensusTrace run_basic(const JointModel& model, const ConsensusConfig& config, Hypothesis truth, Rng& rng)
{
    return run_rounds(model, config, Scheme::Basic, truth, rng,
                      [](RoundRecord&, std::size_t, ConsensusTrace&) { return -1; });
}

ConsensusTrace run_basic(const JointModel& model, const ConsensusConfig& config, Rng& rng)
{
    const Hypothesis truth = draw_truth(model, rng);
    return run_basic(model, config, truth, rng);
}

ConsensusTrace run_aggregated(const JointModel& model, const AggregatedPair& agg, const ConsensusConfig& config,
                              Hypothesis truth, Rng& rng)
{
    if (agg.observer1 == nullptr || agg.observer2 == nullptr) {
        throw MissingAggModel("the aggregated scheme needs aggregated models for both observers");
    }
    if (agg.observer1->observer() != Observer::One || agg.observer2->observer() != Observer::Two) {
        throw ConfigError("aggregated models are assigned to the wrong observers");
    }
    if (agg.observer1->obs_alphabet() != model.s1_size() || agg.observer2->obs_alphabet() != model.s2_size()) {
        throw ConfigError("aggregated models do not match the model's alphabets");
    }
    AlphaState a1 = AlphaState::initial(model.prior());
    AlphaState a2 = a1;
    auto step = [&](const AlphaState& s, std::size_t obs, int received, const AggregatedModel& m, Observer o) {
        if (s.cursor() != AggregatedModel::kNone && m.depth(s.cursor()) < m.horizon()) {
            return alpha_update_general(s, obs, received, m);
        }
        return alpha_update_independent(s, obs, BetaValue{1.0, s.n() + 1}, model, o);
    };
    return run_rounds(model, config, Scheme::Aggregated, truth, rng,
                      [&](RoundRecord& rec, std::size_t n, ConsensusTrace& trace) {
                          a1 = step(a1, rec.obs.y, rec.d2, *agg.observer1, Observer::One);
                          a2 = step(a2, rec.obs.z, rec.d1, *agg.observer2, Observer::Two);
                          rec.alpha1 = a1.alpha();
                          rec.alpha2 = a2.alpha();
                          const int o1 = a1.at_least(config.t3) ? 1 : 0;
                          const int o2 = a2.at_least(config.t4) ? 1 : 0;
                          record_updated_decisions(rec, n, o1, o2, config, trace);
                          return o1 == o2 ? o1 : -1;
                      });
}

ConsensusTrace run_aggregated(const JointModel& model, const AggregatedPair& agg, const ConsensusConfig& config,
                              Rng& rng)
{
    const Hypothesis truth = draw_truth(model, rng);
    return run_aggregated(model, agg, config, truth, rng);
}

ConsensusTrace run_accuracy_exchange(const JointModel& model, const DecisionLawPair& laws,
                                     const ConsensusConfig& config, Hypothesis truth, Rng& rng)
{
    if (laws.observer1 == nullptr || laws.observer2 == nullptr) {
        throw MissingDecisionLaw("the accuracy-exchange scheme needs decision laws for both observers");
    }
    if (laws.observer1->observer() != Observer::One || laws.observer2->observer() != Observer::Two) {
        throw ConfigError("decision laws are assigned to the wrong observers");
    }
    AlphaState a1 = AlphaState::initial(model.prior());
    AlphaState a2 = a1;
    std::vector<std::uint8_t> d1s;
    std::vector<std::uint8_t> d2s;
    d1s.reserve(config.max_rounds);
    d2s.reserve(config.max_rounds);
    auto accuracy = [](const DecisionSequenceDistribution& law, const std::vector<std::uint8_t>& prefix) {
        if (prefix.size() > law.horizon()) return BetaValue{1.0, prefix.size()};
        return beta_clamped(law, prefix);
    };
    return run_rounds(model, config, Scheme::AccuracyExchange, truth, rng,
                      [&](RoundRecord& rec, std::size_t n, ConsensusTrace& trace) {
                          // every continuing round is a disagreement round, so the
                          // prefixes below cover all rounds so far
                          d1s.push_back(static_cast<std::uint8_t>(rec.d1));
                          d2s.push_back(static_cast<std::uint8_t>(rec.d2));
                          const BetaValue b1 = accuracy(*laws.observer1, d1s);
                          const BetaValue b2 = accuracy(*laws.observer2, d2s);
                          rec.beta1 = b1.beta;
                          rec.beta2 = b2.beta;
                          trace.reals_exchanged += 2;
                          if (config.record_rounds) {
                              trace.messages.push_back({n, Observer::One, MessageKind::Accuracy, 0, b1.beta});
                              trace.messages.push_back({n, Observer::Two, MessageKind::Accuracy, 0, b2.beta});
                          }
                          a1 = alpha_update_independent(a1, rec.obs.y, b2, model, Observer::One);
                          a2 = alpha_update_independent(a2, rec.obs.z, b1, model, Observer::Two);
                          rec.alpha1 = a1.alpha();
                          rec.alpha2 = a2.alpha();
                          const int o1 = a1.at_least(config.t3) ? 1 : 0;
                          const int o2 = a2.at_least(config.t4) ? 1 : 0;
                          record_updated_decisions(rec, n, o1, o2, config, trace);
                          return o1 == o2 ? o1 : -1;
                      });
}

ConsensusTrace run_accuracy_exchange(const JointModel& model, const DecisionLawPair& laws,
                                     const ConsensusConfig& config, Rng& rng)
{
    const Hypothesis truth = draw_truth(model, rng);
    return run_accuracy_exchange(model, laws, config, truth, rng);
}

ConsensusTrace run_consensus(const JointModel& model, const ConsensusConfig& config, const AggregatedPair& agg,
                             const DecisionLawPair& laws, Hypothesis truth, Rng& rng)
{
    switch (config.scheme) {
    case Scheme::Basic: return run_basic(model, config, truth, rng);
    case Scheme::Aggregated: return run_aggregated(model, agg, config, truth, rng);
    case Scheme::AccuracyExchange: return run_accuracy_exchange(model, laws, config, truth, rng);
    }
    throw ConfigError("unknown scheme");
}

}  // namespace dualobs
