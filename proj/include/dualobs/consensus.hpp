#pragma once

#include "dualobs/aggspace.hpp"
#include "dualobs/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dualobs {

enum class Scheme : std::uint8_t { Basic, Aggregated, AccuracyExchange };

const char* scheme_name(Scheme s);

struct ConsensusConfig {
    double t1 = 1.0;  // local LRT thresholds on the likelihood ratio
    double t2 = 1.0;
    double t3 = 0.5;  // alpha thresholds for the updated decisions, in (0,1)
    double t4 = 0.5;
    std::size_t max_rounds = 200;
    Scheme scheme = Scheme::Basic;
    bool record_rounds = true;  // keep per-round records and messages in the trace
};

// Throws ConfigError on a config that breaks its invariants.
void check_config(const ConsensusConfig& config);

enum class MessageKind : std::uint8_t { Decision, UpdatedDecision, Accuracy };

struct RoundMessage {
    std::size_t round = 0;
    Observer sender = Observer::One;
    MessageKind kind = MessageKind::Decision;
    int bit = 0;
    double beta = 0.0;

    friend bool operator==(const RoundMessage&, const RoundMessage&) = default;
};

struct RoundRecord {
    std::size_t round = 0;
    ObservationPair obs;
    int d1 = 0;
    int d2 = 0;
    std::optional<int> o1;
    std::optional<int> o2;
    std::optional<double> beta1;  // sent by observer 1
    std::optional<double> beta2;
    std::optional<double> alpha1;
    std::optional<double> alpha2;
    bool stopped = false;

    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct ConsensusTrace {
    Scheme scheme = Scheme::Basic;
    Hypothesis true_h = Hypothesis::H0;
    std::vector<RoundRecord> rounds;
    std::vector<RoundMessage> messages;
    std::optional<std::size_t> stopping_time;  // empty: DidNotStop (or aborted)
    std::optional<Hypothesis> final_decision;
    std::size_t rounds_run = 0;
    std::uint64_t bits_exchanged = 0;
    std::uint64_t reals_exchanged = 0;
    bool aborted = false;  // a history or decision prefix had no mass under either hypothesis
    std::string abort_reason;

    bool did_not_stop() const { return !stopping_time && !aborted; }
    bool correct() const { return final_decision && *final_decision == true_h; }

    friend bool operator==(const ConsensusTrace&, const ConsensusTrace&) = default;
};

// Aggregated models for both observers, as used by the 4-step scheme.
struct AggregatedPair {
    const AggregatedModel* observer1 = nullptr;
    const AggregatedModel* observer2 = nullptr;
};

// Decision laws for both observers, as used by the 5-step scheme.
struct DecisionLawPair {
    const DecisionSequenceDistribution* observer1 = nullptr;
    const DecisionSequenceDistribution* observer2 = nullptr;
};

// Each overload without `truth` first draws H from the model prior.
ConsensusTrace run_basic(const JointModel& model, const ConsensusConfig& config, Hypothesis truth, Rng& rng);
ConsensusTrace run_basic(const JointModel& model, const ConsensusConfig& config, Rng& rng);

// Past the aggregated models' horizon, alpha keeps absorbing the observer's
// own observations with the received decisions treated as uninformative.
ConsensusTrace run_aggregated(const JointModel& model, const AggregatedPair& agg, const ConsensusConfig& config,
                              Hypothesis truth, Rng& rng);
ConsensusTrace run_aggregated(const JointModel& model, const AggregatedPair& agg, const ConsensusConfig& config,
                              Rng& rng);

// Past the decision laws' horizon, beta is taken as 1.
ConsensusTrace run_accuracy_exchange(const JointModel& model, const DecisionLawPair& laws,
                                     const ConsensusConfig& config, Hypothesis truth, Rng& rng);
ConsensusTrace run_accuracy_exchange(const JointModel& model, const DecisionLawPair& laws,
                                     const ConsensusConfig& config, Rng& rng);

// Dispatches on config.scheme. Artifacts unused by the scheme may be empty.
ConsensusTrace run_consensus(const JointModel& model, const ConsensusConfig& config, const AggregatedPair& agg,
                             const DecisionLawPair& laws, Hypothesis truth, Rng& rng);

}  // namespace dualobs
