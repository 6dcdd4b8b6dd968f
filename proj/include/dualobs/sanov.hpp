#pragma once

#include "dualobs/model.hpp"
#include "dualobs/projection.hpp"

#include <cstdint>
#include <span>

namespace dualobs {

inline constexpr std::size_t kSanovMaxSamples = 40;
inline constexpr std::uint64_t kSanovDefaultBudget = 20'000'000;

enum class SanovMethod : std::uint8_t { Auto, JointTypes, MarginalTypes };

// Exact probability, under n i.i.d. draws from f_h, that the empirical type
// lies in the constraint set (boundaries included). JointTypes sums the
// multinomial law over every joint type; MarginalTypes applies to product
// models whose constraint directions split as g(y) + k(z), and sums over
// pairs of marginal types instead. Auto picks JointTypes when the type count
// fits the budget. Throws BudgetExceeded beyond n = 40 or the budget.
double sanov_exact(const JointModel& model, Hypothesis h, std::span<const HalfSpaceConstraint> constraints,
                   std::size_t n, SanovMethod method = SanovMethod::Auto,
                   std::uint64_t budget = kSanovDefaultBudget);

// Number of types with denominator n over an alphabet of size k.
double type_count(std::size_t n, std::size_t k);

// -(1/n) log2 P, +inf for P = 0.
double finite_n_exponent(double probability, std::size_t n);

}  // namespace dualobs
