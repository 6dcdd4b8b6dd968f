#pragma once

#include "dualobs/model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dualobs {

// Decision prefixes d_1..d_n are packed with d_i at bit (i - 1).
using DecisionCode = std::uint32_t;

inline constexpr std::size_t kDefaultDecisionHorizonCap = 12;

// Exact law P(D_1..D_n = d | H = h) of one observer's local-LRT decision
// stream, for every prefix length up to the horizon.
class DecisionSequenceDistribution {
public:
    DecisionSequenceDistribution(Observer observer, std::size_t horizon, double lr_threshold,
                                 std::array<std::vector<std::vector<double>>, 2> probs);

    // A law under which the decisions carry no information about H: every
    // prefix of length n has probability 2^-n under both hypotheses.
    static DecisionSequenceDistribution uninformative(Observer observer, std::size_t horizon);

    Observer observer() const { return observer_; }
    std::size_t horizon() const { return horizon_; }
    double lr_threshold() const { return lr_threshold_; }

    double probability(Hypothesis h, std::span<const std::uint8_t> prefix) const;
    double probability(Hypothesis h, std::size_t n, DecisionCode code) const;

    std::string to_json() const;
    static DecisionSequenceDistribution from_json(const std::string& text);

    friend bool operator==(const DecisionSequenceDistribution&, const DecisionSequenceDistribution&) = default;

private:
    Observer observer_;
    std::size_t horizon_;
    double lr_threshold_;
    // probs_[h][n][code], n = 0..horizon
    std::array<std::vector<std::vector<double>>, 2> probs_;
};

// Dynamic program over (decision prefix, running empirical type) states. The
// local log-likelihood ratio is a linear functional of the type, so the type
// carries everything needed to decide at each step.
DecisionSequenceDistribution exact_decision_law(const JointModel& model, Observer observer, double lr_threshold,
                                                std::size_t horizon,
                                                std::size_t horizon_cap = kDefaultDecisionHorizonCap);

struct BetaValue {
    double beta = 1.0;
    std::size_t round = 0;
};

inline constexpr double kBetaFloor = 1e-9;
inline constexpr double kBetaCeiling = 1e9;

// P(d_n | d_1..d_{n-1}, H=0) / P(d_n | d_1..d_{n-1}, H=1). Throws BetaUndefined
// on any zero.
BetaValue beta(const DecisionSequenceDistribution& dsd, std::span<const std::uint8_t> prefix);

// As beta(), but a zero under exactly one hypothesis clamps the ratio into
// [1e-9, 1e9]. Zero under both still throws.
BetaValue beta_clamped(const DecisionSequenceDistribution& dsd, std::span<const std::uint8_t> prefix);

// Joint law of (H, (own observation, received decision) prefixes) collected by
// one observer, stored as a prefix trie. Symbols are obs * 2 + decision.
// Node masses are joint weights of (H = h, prefix): string counts for
// frequentist models, probabilities for exact ones. A node's mass equals the
// sum over its children.
class AggregatedModel {
public:
    enum class Kind : std::uint8_t { Frequentist, Exact, Independent };

    static constexpr std::int64_t kRoot = 0;
    static constexpr std::int64_t kNone = -1;

    Observer observer() const { return observer_; }
    std::size_t horizon() const { return horizon_; }
    std::size_t obs_alphabet() const { return obs_alphabet_; }
    std::size_t symbol_count() const { return obs_alphabet_ * 2; }
    double t1() const { return t1_; }
    double t2() const { return t2_; }
    std::uint64_t sample_count() const { return sample_count_; }
    Kind kind() const { return kind_; }
    std::size_t node_count() const { return parent_.size(); }

    std::int64_t child(std::int64_t node, std::size_t obs, int decision) const;
    std::int64_t parent(std::int64_t node) const { return parent_[static_cast<std::size_t>(node)]; }
    std::size_t depth(std::int64_t node) const { return depth_[static_cast<std::size_t>(node)]; }
    double mass(std::int64_t node, Hypothesis h) const
    {
        return mass_[static_cast<std::size_t>(node) * 2 + static_cast<std::size_t>(to_int(h))];
    }

    // P(obs, decision | history at node, H = h); 0 when the node or the
    // extension has no mass under h.
    double conditional(std::int64_t node, std::size_t obs, int decision, Hypothesis h) const;

    // Marginal law of the received-decision prefix: P(d_1..d_n | H = h).
    double decision_prefix_probability(Hypothesis h, std::span<const std::uint8_t> prefix) const;

    std::string to_json() const;
    static AggregatedModel from_json(const std::string& text);

    friend bool operator==(const AggregatedModel&, const AggregatedModel&) = default;

    friend std::pair<AggregatedModel, AggregatedModel> build_aggregated_model(const JointModel&, double, double,
                                                                              std::size_t, std::uint64_t,
                                                                              std::uint64_t, std::size_t);
    friend AggregatedModel exact_aggregated_model(const JointModel&, Observer, double, double, std::size_t);
    friend AggregatedModel independent_aggregated_model(const JointModel&, Observer,
                                                        const DecisionSequenceDistribution&, std::size_t);

private:
    AggregatedModel(Observer observer, std::size_t horizon, std::size_t obs_alphabet, double t1, double t2,
                    std::uint64_t sample_count, Kind kind);

    std::int64_t add_node(std::int64_t parent, std::size_t symbol);

    Observer observer_;
    std::size_t horizon_;
    std::size_t obs_alphabet_;
    double t1_;
    double t2_;
    std::uint64_t sample_count_;
    Kind kind_;
    std::vector<std::int32_t> parent_;
    std::vector<std::uint8_t> depth_;
    std::vector<std::uint16_t> symbol_;
    std::vector<std::int32_t> children_;  // node_count * symbol_count, kNone when absent
    std::vector<double> mass_;            // node_count * 2
};

// Simulates num_strings runs of the data-collection phase: H from the prior,
// then `horizon` rounds in which both observers run local LRTs with (t1, t2)
// and record (own observation, alternate decision). Returns the models of
// observer 1 and observer 2. Strings are generated in fixed-size chunks with
// seeds derived from `seed`, so the result does not depend on `workers`.
std::pair<AggregatedModel, AggregatedModel> build_aggregated_model(const JointModel& model, double t1, double t2,
                                                                   std::size_t horizon, std::uint64_t num_strings,
                                                                   std::uint64_t seed, std::size_t workers = 1);

// Exact aggregated law for `observer`, by enumeration over the alternate
// observer's running types. Feasible for small horizons only (cap 8).
AggregatedModel exact_aggregated_model(const JointModel& model, Observer observer, double t1, double t2,
                                       std::size_t horizon);

// Aggregated law under conditional independence of own observations and the
// alternate decision stream: p_h * prod f^i_h(obs) * P_alt(d | h).
AggregatedModel independent_aggregated_model(const JointModel& model, Observer observer,
                                             const DecisionSequenceDistribution& alternate_law,
                                             std::size_t horizon);

// Posterior of H = 1 given an observer's own observations and the received
// decision stream. Held as natural log-odds; `cursor` tracks the absorbed
// history inside an AggregatedModel (kNone when not tracking one).
class AlphaState {
public:
    static AlphaState initial(Prior prior);
    static AlphaState from_alpha(double alpha, std::size_t n = 0, std::int64_t cursor = AggregatedModel::kRoot);

    double alpha() const;
    double log_odds() const { return log_odds_; }
    std::size_t n() const { return n_; }
    std::int64_t cursor() const { return cursor_; }

    // alpha >= t, evaluated in log-odds.
    bool at_least(double t) const;

    AlphaState advanced(double log_odds_increment, std::int64_t cursor) const
    {
        return AlphaState(log_odds_ + log_odds_increment, n_ + 1, cursor);
    }

private:
    AlphaState(double log_odds, std::size_t n, std::int64_t cursor) : log_odds_(log_odds), n_(n), cursor_(cursor) {}

    double log_odds_ = 0.0;
    std::size_t n_ = 0;
    std::int64_t cursor_ = AggregatedModel::kRoot;
};

// Bayes update against the aggregated model's conditional law of
// (obs, received decision) given the absorbed history.
AlphaState alpha_update_general(const AlphaState& state, std::size_t obs, int received_decision,
                                const AggregatedModel& agg);

// Simplified update for conditionally independent observers:
// alpha' = P(obs|1) alpha / (P(obs|1) alpha + P(obs|0) (1 - alpha) beta).
AlphaState alpha_update_independent(const AlphaState& state, std::size_t obs, BetaValue beta,
                                    const JointModel& model, Observer observer);

}  // namespace dualobs
