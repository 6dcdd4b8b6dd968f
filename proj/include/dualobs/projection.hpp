#pragma once

#include "dualobs/model.hpp"

#include <span>
#include <vector>

namespace dualobs {

enum class Sense : std::uint8_t { AtLeast, AtMost };

// direction . Q  (>= | <=)  offset
struct HalfSpaceConstraint {
    std::vector<double> direction;
    double offset = 0.0;
    Sense sense = Sense::AtLeast;
};

struct ProjectionResult {
    double rate = 0.0;  // D(Q* || f) in bits
    Pmf achiever;
    std::vector<double> multipliers;  // one per constraint, >= 0, in input order
    std::vector<bool> active;
    double dual_value = 0.0;
    double duality_gap = 0.0;
};

// max over the simplex of min_j (slack of constraint j). Positive iff the
// constraint set has nonempty interior; negative iff it is empty. Supports up
// to two constraints.
double interior_margin(std::span<const HalfSpaceConstraint> constraints);

// argmin D(Q || f) over the simplex intersected with up to two half-spaces.
// Solved through the concave dual
//   h(mu) = sum_j mu_j b_j - log2 sum_i f_i 2^{sum_j mu_j a_ji},  mu >= 0,
// whose maximizer gives the exponentially tilted achiever. Constraints whose
// direction is constant are either dropped (always satisfied, equality
// allowed) or rejected. f must be strictly positive.
ProjectionResult info_projection(std::span<const double> f, std::span<const HalfSpaceConstraint> constraints);

// Q = f 2^{mu . a} / Z, normalized in log domain.
Pmf tilt(std::span<const double> f, std::span<const std::vector<double>> directions, std::span<const double> mu);

}  // namespace dualobs
