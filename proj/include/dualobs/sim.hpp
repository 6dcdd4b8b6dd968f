#pragma once

#include "dualobs/aggspace.hpp"
#include "dualobs/consensus.hpp"
#include "dualobs/detect.hpp"
#include "dualobs/model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dualobs {

inline constexpr std::uint64_t kLowConfidenceDenominator = 100;

// One estimated operating point. `error` is a binomial proportion over
// `denominator` trials: all trials for fixed-n centralized runs, agreeing
// trials for the conditional agree-wrong estimate, and stopped trials for
// sequential schemes.
struct ResultRow {
    std::string scheme;
    std::string label;
    std::optional<std::size_t> n;
    double mean_time = 0.0;
    double time_se = 0.0;
    double error = 0.0;
    double error_se = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t denominator = 0;
    std::uint64_t did_not_stop = 0;
    std::uint64_t aborted = 0;
    bool low_confidence = false;
    bool pareto = false;
    std::optional<double> t1;
    std::optional<double> t2;
    std::optional<double> t3;
    std::optional<double> t4;
    std::optional<double> sprt_lower;
    std::optional<double> sprt_upper;
    std::optional<std::size_t> sprt_cap;
    std::uint64_t seed = 0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

// sqrt(p (1 - p) / trials); 0 when trials = 0.
double binomial_se(double p, std::uint64_t trials);

struct ErrorVsNSpec {
    std::vector<std::size_t> n_list;
    std::uint64_t trials = 100'000;
    // Centralized fixed-n threshold on the likelihood ratio; empty means the
    // center's cost ratio C01 / (C01 + C10).
    std::optional<double> central_threshold;
    double t1 = 1.0;
    double t2 = 1.0;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

// Algo-1 (centralized LRT after n pairs) and Algo-2 (P(agree on the wrong
// hypothesis | agree) after n pairs), one row per n for each. Each trial
// draws one path of max(n_list) pairs and is scored at every n.
std::vector<ResultRow> error_vs_n(const JointModel& model, const ErrorVsNSpec& spec);

// The sweep {(1,1), (k,1/k), (1/k,k) : k = 2..7}, in that order.
std::vector<std::pair<double, double>> standard_threshold_sweep();

// Per threshold pair artifacts for the aggregated and accuracy-exchange schemes.
struct PairArtifacts {
    std::shared_ptr<const AggregatedModel> agg1;
    std::shared_ptr<const AggregatedModel> agg2;
    std::shared_ptr<const DecisionSequenceDistribution> law1;
    std::shared_ptr<const DecisionSequenceDistribution> law2;
};

struct ArtifactBuild {
    std::size_t horizon = 7;
    std::uint64_t strings = 1'000'000;
    bool aggregated = true;
    bool decision_laws = true;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

std::vector<PairArtifacts> build_artifacts(const JointModel& model,
                                           const std::vector<std::pair<double, double>>& pairs,
                                           const ArtifactBuild& build);

struct StoppingTimeSpec {
    std::vector<std::pair<double, double>> threshold_pairs = standard_threshold_sweep();
    // T3 = T4 values swept for the aggregated and accuracy-exchange schemes.
    std::vector<double> alpha_thresholds = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    // SPRT error targets (alpha = beta) and the sample cap. A one-sample
    // truncated test is always added as the leftmost SPRT point.
    std::vector<double> sprt_targets = {0.4,  0.3,  0.25, 0.2,   0.15,  0.1,   0.07,  0.05,
                                        0.03, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005};
    std::size_t sprt_max_samples = 1000;
    bool sprt = true;
    bool basic = true;
    bool aggregated = true;
    bool accuracy_exchange = true;
    std::uint64_t trials = 10'000;
    std::size_t max_rounds = 200;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

// Mean stopping time and error for every operating point of the selected
// schemes; rows carry a Pareto flag computed per scheme. Artifacts are
// indexed like spec.threshold_pairs. Throws MissingArtifact if a selected
// scheme lacks them.
std::vector<ResultRow> error_vs_stopping_time(const JointModel& model, const StoppingTimeSpec& spec,
                                              const std::vector<PairArtifacts>& artifacts);

// Trial `trial` of an operating point: H from the prior, then the scheme,
// all driven by the stream derive_seed(seed, stream, trial).
ConsensusTrace consensus_trial(const JointModel& model, const ConsensusConfig& config, const PairArtifacts& artifacts,
                               std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

// One operating point of a consensus scheme.
ResultRow run_consensus_point(const JointModel& model, const ConsensusConfig& config, const PairArtifacts& artifacts,
                              std::uint64_t trials, std::uint64_t seed, std::uint64_t stream, std::size_t workers);

// One operating point of the SPRT.
ResultRow run_sprt_point(const JointModel& model, const SprtPolicy& policy, std::size_t max_samples,
                         std::uint64_t trials, std::uint64_t seed, std::uint64_t stream, std::size_t workers);

struct ParetoPoint {
    double time = 0.0;
    double error = 0.0;
    std::size_t index = 0;  // caller's reference

    friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

// Non-dominated points sorted by time; exact duplicates collapse to one.
std::vector<ParetoPoint> pareto_filter(std::vector<ParetoPoint> points);

// Piecewise-linear interpolation of a time-sorted front at `time`. Outside the
// front's time range the nearest end is not extrapolated: returns nullopt.
std::optional<double> interpolate_front(const std::vector<ParetoPoint>& front, double time);

// Lowest-error point of a time-sorted front whose time is at most `time`.
std::optional<ParetoPoint> best_within_budget(const std::vector<ParetoPoint>& front, double time);

// Rows of one scheme, Pareto-filtered, as (time, error) points whose index is
// the row index in `rows`.
std::vector<ParetoPoint> scheme_front(const std::vector<ResultRow>& rows, const std::string& scheme);

// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dualobs
