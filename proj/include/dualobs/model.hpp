#pragma once

#include "dualobs/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dualobs {

enum class Hypothesis : std::uint8_t { H0 = 0, H1 = 1 };

inline constexpr int to_int(Hypothesis h) { return static_cast<int>(h); }
inline constexpr Hypothesis hypothesis_from(bool one) { return one ? Hypothesis::H1 : Hypothesis::H0; }
inline constexpr Hypothesis other(Hypothesis h) { return h == Hypothesis::H0 ? Hypothesis::H1 : Hypothesis::H0; }

enum class Observer : std::uint8_t { One = 1, Two = 2 };

inline constexpr Observer alternate(Observer o) { return o == Observer::One ? Observer::Two : Observer::One; }

using Pmf = std::vector<double>;

struct ObservationPair {
    std::size_t y = 0;
    std::size_t z = 0;

    friend bool operator==(const ObservationPair&, const ObservationPair&) = default;
};

struct Prior {
    double p0 = 0.5;
    double p1 = 0.5;

    double of(Hypothesis h) const { return h == Hypothesis::H0 ? p0 : p1; }
};

// Bayes costs C10 (miss: decide 0 when H = 1) and C01 (false alarm).
struct CostPair {
    double c10 = 1.0;
    double c01 = 1.0;

    // C01 / (C01 + C10).
    double threshold() const { return c01 / (c01 + c10); }

    friend bool operator==(const CostPair&, const CostPair&) = default;
};

struct Costs {
    CostPair center;
    CostPair observer1;
    CostPair observer2;

    friend bool operator==(const Costs&, const Costs&) = default;
};

// Unvalidated model description, as read from a model file.
struct JointModelSpec {
    std::size_t s1_size = 0;
    std::size_t s2_size = 0;
    Pmf f0;  // row-major over S1 x S2: index y * s2_size + z
    Pmf f1;
    double p0 = 0.5;
    Costs costs;

    friend bool operator==(const JointModelSpec&, const JointModelSpec&) = default;
};

inline constexpr double kInputNormalizationTolerance = 1e-9;
inline constexpr double kInternalNormalizationTolerance = 1e-12;

// A validated two-observer model. Immutable; marginals and log2 likelihood
// ratio tables are computed once at validation.
class JointModel {
public:
    std::size_t s1_size() const { return s1_; }
    std::size_t s2_size() const { return s2_; }
    std::size_t cells() const { return s1_ * s2_; }
    std::size_t index(std::size_t y, std::size_t z) const { return y * s2_ + z; }
    std::size_t alphabet_size(Observer o) const { return o == Observer::One ? s1_ : s2_; }

    std::span<const double> joint(Hypothesis h) const { return f_[to_int(h)]; }
    double joint(Hypothesis h, std::size_t y, std::size_t z) const { return f_[to_int(h)][index(y, z)]; }
    std::span<const double> marginal(Observer o, Hypothesis h) const
    {
        return o == Observer::One ? m1_[to_int(h)] : m2_[to_int(h)];
    }

    // log2 f1/f0 per joint cell.
    std::span<const double> joint_llr() const { return joint_llr_; }
    // log2 f^i_1 / f^i_0 per symbol of observer i's alphabet.
    std::span<const double> marginal_llr(Observer o) const { return o == Observer::One ? llr1_ : llr2_; }

    Prior prior() const { return prior_; }
    const Costs& costs() const { return costs_; }

    // Largest cellwise deviation |f_h(y,z) - f^1_h(y) f^2_h(z)| over both h.
    double independence_defect() const;
    bool is_product(double tol = 1e-12) const { return independence_defect() <= tol; }

    JointModelSpec spec() const;

    friend JointModel validate_model(const JointModelSpec& raw);

private:
    JointModel() = default;

    std::size_t s1_ = 0;
    std::size_t s2_ = 0;
    std::array<Pmf, 2> f_;
    std::array<Pmf, 2> m1_;
    std::array<Pmf, 2> m2_;
    std::vector<double> joint_llr_;
    std::vector<double> llr1_;
    std::vector<double> llr2_;
    Prior prior_;
    Costs costs_;
};

// Checks every model invariant and returns the validated model. Input PMFs
// within 1e-9 of unit mass are renormalized.
JointModel validate_model(const JointModelSpec& raw);

Pmf marginal(const JointModel& model, Observer observer, Hypothesis h);

// Sum p log2(p/q), in bits. Terms with p = 0 contribute nothing.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Normalized count vector of a sample sequence over S1 x S2.
class EmpiricalType {
public:
    EmpiricalType(std::size_t s1_size, std::size_t s2_size);

    void add(ObservationPair obs);
    EmpiricalType& operator+=(const EmpiricalType& other);

    std::size_t n() const { return n_; }
    std::size_t s1_size() const { return s1_; }
    std::size_t s2_size() const { return s2_; }
    std::span<const std::uint64_t> counts() const { return counts_; }

    Pmf pmf() const;
    Pmf marginal_y() const;
    Pmf marginal_z() const;

private:
    std::size_t s1_;
    std::size_t s2_;
    std::size_t n_ = 0;
    std::vector<std::uint64_t> counts_;
};

EmpiricalType empirical_type(std::span<const ObservationPair> seq, std::size_t s1_size, std::size_t s2_size);

// n pairs drawn i.i.d. from f_h.
std::vector<ObservationPair> sample(const JointModel& model, Hypothesis h, Rng& rng, std::size_t n);

// Pre-built per-hypothesis samplers for hot simulation loops.
class JointSampler {
public:
    explicit JointSampler(const JointModel& model);

    ObservationPair draw(Hypothesis h, Rng& rng) const
    {
        const std::size_t cell = samplers_[to_int(h)](rng);
        return {cell / s2_, cell % s2_};
    }

private:
    std::size_t s2_;
    std::array<DiscreteSampler, 2> samplers_;
};

}  // namespace dualobs
