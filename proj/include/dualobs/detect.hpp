#pragma once

#include "dualobs/model.hpp"

#include <cstddef>
#include <string>

namespace dualobs {

enum class Scope : std::uint8_t { Central, Observer1, Observer2 };

inline constexpr Scope scope_of(Observer o) { return o == Observer::One ? Scope::Observer1 : Scope::Observer2; }

// Running log2 likelihood ratio of one detector. At n = 0 the ratio is 1.
struct DetectorState {
    double log_lr = 0.0;
    std::size_t n = 0;
    Scope scope = Scope::Central;
};

// Decisions compare log_lr against log2(threshold) with this slack so that
// exact ties are not lost to summation-order rounding.
inline constexpr double kTieTolerance = 1e-10;

struct ThresholdPolicy {
    double lr_threshold = 1.0;
    std::string label;

    ThresholdPolicy() = default;
    explicit ThresholdPolicy(double t, std::string name = {});

    double log2_threshold() const;
};

DetectorState central_update(DetectorState state, ObservationPair obs, const JointModel& model);
DetectorState local_update(DetectorState state, std::size_t obs_index, const JointModel& model);

// 1 iff pi >= T; ties decide 1.
Hypothesis decide(const DetectorState& state, const ThresholdPolicy& policy);
bool decide_log2(double log_lr, double log2_threshold);

// p1 pi / (p1 pi + p0), evaluated as a logistic in log space.
double posterior(const DetectorState& state, Prior prior);
double posterior_from_log_lr(double log_lr, Prior prior);

// Posterior threshold t in (0,1) to the equivalent likelihood-ratio threshold
// t p0 / (p1 (1 - t)).
double posterior_threshold_to_lr(double t, Prior prior);

// Wald boundaries on the likelihood ratio: decide 0 at pi <= lower, 1 at pi >= upper.
struct SprtPolicy {
    double lower = 0.5;
    double upper = 2.0;

    SprtPolicy() = default;
    SprtPolicy(double a, double b);

    // A = beta / (1 - alpha), B = (1 - beta) / alpha.
    static SprtPolicy from_error_targets(double alpha, double beta);
};

enum class SprtOutcome : std::uint8_t { Continue, Decide0, Decide1 };

SprtOutcome sprt_step(const DetectorState& state, const SprtPolicy& policy);

struct SprtRun {
    Hypothesis decision = Hypothesis::H0;
    std::size_t stopping_time = 0;
    bool truncated = false;  // hit the sample cap; decided by posterior >= 1/2
};

// Sequential test on joint observations drawn from f_truth, at most
// max_samples of them.
SprtRun run_sprt(const JointModel& model, const JointSampler& sampler, const SprtPolicy& policy,
                 std::size_t max_samples, Hypothesis truth, Rng& rng);

}  // namespace dualobs
