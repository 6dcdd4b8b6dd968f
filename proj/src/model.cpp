#include "dualobs/model.hpp"

#include "dualobs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dualobs {

namespace {

void check_pmf(const Pmf& p, std::size_t expected, const char* name)
{
    if (p.size() != expected) {
        throw ValidationError(std::string(name) + ": expected " + std::to_string(expected) + " cells, got " +
                              std::to_string(p.size()));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i])) throw ValidationError(std::string(name) + ": non-finite cell");
        if (p[i] <= 0.0) {
            throw SupportError(std::string(name) + ": cell " + std::to_string(i) + " is not strictly positive");
        }
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::abs(total - 1.0) > kInputNormalizationTolerance) {
        throw NormalizationError(std::string(name) + " sums to " + std::to_string(total));
    }
}

Pmf renormalized(const Pmf& p)
{
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    Pmf out(p.size());
    std::transform(p.begin(), p.end(), out.begin(), [total](double v) { return v / total; });
    return out;
}

}  // namespace

JointModel validate_model(const JointModelSpec& raw)
{
    if (raw.s1_size < 2 || raw.s2_size < 2) throw ValidationError("alphabet sizes must be at least 2");
    const std::size_t cells = raw.s1_size * raw.s2_size;
    check_pmf(raw.f0, cells, "f0");
    check_pmf(raw.f1, cells, "f1");

    if (!(raw.p0 > 0.0 && raw.p0 < 1.0)) throw PriorError("prior p0 must lie in (0, 1)");

    for (const CostPair* c : {&raw.costs.center, &raw.costs.observer1, &raw.costs.observer2}) {
        if (!(c->c10 >= 0.0 && c->c01 >= 0.0) || c->c10 + c->c01 <= 0.0) {
            throw ValidationError("costs must be nonnegative and not both zero");
        }
    }

    JointModel m;
    m.s1_ = raw.s1_size;
    m.s2_ = raw.s2_size;
    m.f_[0] = renormalized(raw.f0);
    m.f_[1] = renormalized(raw.f1);
    if (m.f_[0] == m.f_[1]) throw DegenerateError("f0 and f1 coincide; KL divergence is zero");
    if (!(kl_divergence(m.f_[0], m.f_[1]) > 0.0) || !(kl_divergence(m.f_[1], m.f_[0]) > 0.0)) {
        throw DegenerateError("f0 and f1 are numerically indistinguishable");
    }

    for (int h = 0; h < 2; ++h) {
        m.m1_[h].assign(m.s1_, 0.0);
        m.m2_[h].assign(m.s2_, 0.0);
        for (std::size_t y = 0; y < m.s1_; ++y) {
            for (std::size_t z = 0; z < m.s2_; ++z) {
                const double v = m.f_[h][m.index(y, z)];
                m.m1_[h][y] += v;
                m.m2_[h][z] += v;
            }
        }
    }

    m.joint_llr_.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) m.joint_llr_[i] = std::log2(m.f_[1][i] / m.f_[0][i]);
    m.llr1_.resize(m.s1_);
    for (std::size_t y = 0; y < m.s1_; ++y) m.llr1_[y] = std::log2(m.m1_[1][y] / m.m1_[0][y]);
    m.llr2_.resize(m.s2_);
    for (std::size_t z = 0; z < m.s2_; ++z) m.llr2_[z] = std::log2(m.m2_[1][z] / m.m2_[0][z]);

    m.prior_ = {raw.p0, 1.0 - raw.p0};
    m.costs_ = raw.costs;
    return m;
}

double JointModel::independence_defect() const
{
    double worst = 0.0;
    for (int h = 0; h < 2; ++h) {
        for (std::size_t y = 0; y < s1_; ++y) {
            for (std::size_t z = 0; z < s2_; ++z) {
                worst = std::max(worst, std::abs(f_[h][index(y, z)] - m1_[h][y] * m2_[h][z]));
            }
        }
    }
    return worst;
}

JointModelSpec JointModel::spec() const
{
    return JointModelSpec{s1_, s2_, f_[0], f_[1], prior_.p0, costs_};
}

Pmf marginal(const JointModel& model, Observer observer, Hypothesis h)
{
    const auto m = model.marginal(observer, h);
    return Pmf(m.begin(), m.end());
}

double kl_divergence(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size()) throw DomainError("kl_divergence: support sizes differ");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw SupportError("kl_divergence: q vanishes where p is positive");
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return std::max(d, 0.0);
}

EmpiricalType::EmpiricalType(std::size_t s1_size, std::size_t s2_size)
    : s1_(s1_size), s2_(s2_size), counts_(s1_size * s2_size, 0)
{
}

void EmpiricalType::add(ObservationPair obs)
{
    if (obs.y >= s1_ || obs.z >= s2_) throw DomainError("observation index out of range");
    ++counts_[obs.y * s2_ + obs.z];
    ++n_;
}

EmpiricalType& EmpiricalType::operator+=(const EmpiricalType& other)
{
    if (other.s1_ != s1_ || other.s2_ != s2_) throw DomainError("empirical types over different alphabets");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    n_ += other.n_;
    return *this;
}

Pmf EmpiricalType::pmf() const
{
    Pmf out(counts_.size(), 0.0);
    if (n_ == 0) return out;
    for (std::size_t i = 0; i < counts_.size(); ++i) out[i] = static_cast<double>(counts_[i]) / static_cast<double>(n_);
    return out;
}

Pmf EmpiricalType::marginal_y() const
{
    Pmf out(s1_, 0.0);
    if (n_ == 0) return out;
    for (std::size_t y = 0; y < s1_; ++y) {
        std::uint64_t c = 0;
        for (std::size_t z = 0; z < s2_; ++z) c += counts_[y * s2_ + z];
        out[y] = static_cast<double>(c) / static_cast<double>(n_);
    }
    return out;
}

Pmf EmpiricalType::marginal_z() const
{
    Pmf out(s2_, 0.0);
    if (n_ == 0) return out;
    for (std::size_t z = 0; z < s2_; ++z) {
        std::uint64_t c = 0;
        for (std::size_t y = 0; y < s1_; ++y) c += counts_[y * s2_ + z];
        out[z] = static_cast<double>(c) / static_cast<double>(n_);
    }
    return out;
}

EmpiricalType empirical_type(std::span<const ObservationPair> seq, std::size_t s1_size, std::size_t s2_size)
{
    if (seq.empty()) throw EmptySequence("empirical_type of an empty sequence");
    EmpiricalType t(s1_size, s2_size);
    for (const auto& obs : seq) t.add(obs);
    return t;
}

JointSampler::JointSampler(const JointModel& model)
    : s2_(model.s2_size()),
      samplers_{DiscreteSampler(model.joint(Hypothesis::H0)), DiscreteSampler(model.joint(Hypothesis::H1))}
{
}

std::vector<ObservationPair> sample(const JointModel& model, Hypothesis h, Rng& rng, std::size_t n)
{
    const JointSampler sampler(model);
    std::vector<ObservationPair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.draw(h, rng));
    return out;
}

}  // namespace dualobs
