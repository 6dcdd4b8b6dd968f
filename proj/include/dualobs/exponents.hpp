#pragma once

#include "dualobs/model.hpp"
#include "dualobs/projection.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dualobs {

// Joint LLR V and the marginal LLRs replicated over the joint index:
// v2(y,z) = log2 f^1_1(y)/f^1_0(y), v3(y,z) = log2 f^2_1(z)/f^2_0(z).
struct LlrVectors {
    std::vector<double> V;
    std::vector<double> v2;
    std::vector<double> v3;
    double t_l = 0.0;  // min / max of V
    double t_u = 0.0;
    double t1_l = 0.0;  // min / max of v2
    double t1_u = 0.0;
    double t2_l = 0.0;  // min / max of v3
    double t2_u = 0.0;
};

LlrVectors llr_vectors(const JointModel& model);

struct TiltedDistribution {
    Pmf pmf;
    Hypothesis h = Hypothesis::H0;
    double tau = 0.0;
    double lambda = 0.0;
    double sigma = 0.0;
};

// Q ∝ f_h^{1-tau} f_{1-h}^tau.
TiltedDistribution tilt_centralized(const JointModel& model, Hypothesis h, double tau);

// Q ∝ f_h (f^1_0/f^1_1)^{s lambda} (f^2_0/f^2_1)^{s sigma}, s = -1 for h = 0, +1 for h = 1.
TiltedDistribution tilt_decentralized(const JointModel& model, Hypothesis h, double lambda, double sigma);

enum class RateScheme : std::uint8_t { Centralized, Decentralized };

const char* rate_scheme_name(RateScheme s);

// Exponents at one operating point. Thresholds are kept in log2 units; the
// false-alarm side projects f0, the miss side projects f1.
struct ExponentResult {
    RateScheme scheme = RateScheme::Centralized;
    double log2_t1 = 0.0;  // centralized: log2 T
    std::optional<double> log2_t2;
    double rate_fa = 0.0;
    double rate_miss = 0.0;
    double rate = 0.0;  // min of the two
    Pmf achiever0;
    Pmf achiever1;
    // centralized: lambda = tau, sigma unused (0)
    double lambda0 = 0.0;
    double sigma0 = 0.0;
    double lambda1 = 0.0;
    double sigma1 = 0.0;
    double duality_gap = 0.0;
};

// rate_fa: projection of f0 onto {V.Q >= log2 T}; rate_miss: projection of f1
// onto {V.Q <= log2 T}. Requires T_L < log2 T < T_U.
ExponentResult centralized_rate(const JointModel& model, double lr_threshold);
ExponentResult centralized_rate_log2(const JointModel& model, double log2_threshold);

// The threshold where the two centralized exponents cross, found by
// bisection; its common value is the optimal centralized rate.
ExponentResult optimal_centralized_rate(const JointModel& model);

struct ThresholdWindow {
    double lower = 0.0;  // min v2.Q over {Q : v3.Q >= log2 T2}
    double upper = 0.0;  // max v2.Q over the same set
};

// Vertex enumeration of the one-constraint polytope. Requires T2_L < log2 T2 < T2_U.
ThresholdWindow threshold_window(const JointModel& model, double lr_threshold_2);

// rate_fa: projection of f0 onto {v2.Q >= log2 T1, v3.Q >= log2 T2};
// rate_miss: projection of f1 onto {v2.Q <= log2 T1, v3.Q <= log2 T2}.
// Throws InfeasibleThresholds unless both regions have nonempty interior (a
// constant LLR axis is allowed exactly at its single value).
ExponentResult decentralized_rate(const JointModel& model, double lr_threshold_1, double lr_threshold_2);
ExponentResult decentralized_rate_log2(const JointModel& model, double log2_t1, double log2_t2);

struct DecentralizedSearch {
    std::size_t grid_points = 64;
    double margin = 1e-6;
    double tolerance = 1e-10;
};

// max over threshold pairs of min(rate_fa, rate_miss): coarse grid over the
// feasible log2-threshold plane, then golden-section refinement in T2 with
// T1 solved by bisection on the crossing of the two exponents.
ExponentResult optimal_decentralized_rate(const JointModel& model, const DecentralizedSearch& search = {});

// 1 / (2^R - 1). Throws DomainError for R <= 0.
double error_bound(double rate);

// Thresholds implied by an achiever: log2 T = E_Q[V] (centralized) or
// (E_Q[v2], E_Q[v3]) (decentralized).
double recover_centralized_threshold(const JointModel& model, std::span<const double> achiever);
std::pair<double, double> recover_decentralized_thresholds(const JointModel& model, std::span<const double> achiever);

}  // namespace dualobs
