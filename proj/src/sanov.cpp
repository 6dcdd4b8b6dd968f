#include "dualobs/sanov.hpp"

#include "dualobs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dualobs {

namespace {

constexpr double kBoundaryTol = 1e-12;

struct GeRow {
    std::vector<double> a;
    double b;
};

std::vector<GeRow> ge_rows(std::span<const HalfSpaceConstraint> constraints, std::size_t cells)
{
    std::vector<GeRow> rows;
    for (const auto& c : constraints) {
        if (c.direction.size() != cells) throw DomainError("constraint direction does not match the model");
        const double s = c.sense == Sense::AtLeast ? 1.0 : -1.0;
        GeRow r{std::vector<double>(cells), s * c.offset};
        for (std::size_t i = 0; i < cells; ++i) r.a[i] = s * c.direction[i];
        rows.push_back(std::move(r));
    }
    return rows;
}

double tolerance_for(const GeRow& r)
{
    double scale = std::abs(r.b);
    for (double v : r.a) scale = std::max(scale, std::abs(v));
    return kBoundaryTol * std::max(1.0, scale);
}

// Visits every count vector of length k summing to n, passing the
// multinomial log-probability and the per-row sums of counts * weights.
template <typename Visit>
void for_each_type(std::size_t n, std::span<const double> pmf, const std::vector<std::vector<double>>& weights,
                   Visit&& visit)
{
    const std::size_t k = pmf.size();
    const std::size_t m = weights.size();
    std::vector<double> log_p(k);
    for (std::size_t i = 0; i < k; ++i) log_p[i] = std::log(pmf[i]);
    std::vector<double> log_fact(n + 1, 0.0);
    for (std::size_t c = 1; c <= n; ++c) log_fact[c] = log_fact[c - 1] + std::log(static_cast<double>(c));

    std::vector<double> score(m, 0.0);
    auto rec = [&](auto&& self, std::size_t cell, std::size_t left, double lp) -> void {
        if (cell + 1 == k) {
            const double c = static_cast<double>(left);
            const double final_lp = lp + c * log_p[cell] - log_fact[left];
            for (std::size_t j = 0; j < m; ++j) score[j] += c * weights[j][cell];
            visit(log_fact[n] + final_lp, std::span<const double>(score));
            for (std::size_t j = 0; j < m; ++j) score[j] -= c * weights[j][cell];
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            const double cd = static_cast<double>(c);
            for (std::size_t j = 0; j < m; ++j) score[j] += cd * weights[j][cell];
            self(self, cell + 1, left - c, lp + cd * log_p[cell] - log_fact[c]);
            for (std::size_t j = 0; j < m; ++j) score[j] -= cd * weights[j][cell];
        }
    };
    rec(rec, 0, n, 0.0);
}

// Splits a(y,z) = g(y) + k(z) when possible.
bool separate(const JointModel& model, const std::vector<double>& a, std::vector<double>& g, std::vector<double>& k)
{
    const std::size_t s1 = model.s1_size();
    const std::size_t s2 = model.s2_size();
    g.assign(s1, 0.0);
    k.assign(s2, 0.0);
    for (std::size_t y = 0; y < s1; ++y) g[y] = a[model.index(y, 0)];
    for (std::size_t z = 0; z < s2; ++z) k[z] = a[model.index(0, z)] - a[model.index(0, 0)];
    double scale = 1.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t y = 0; y < s1; ++y) {
        for (std::size_t z = 0; z < s2; ++z) {
            if (std::abs(a[model.index(y, z)] - g[y] - k[z]) > 1e-12 * scale) return false;
        }
    }
    return true;
}

double joint_types(const JointModel& model, Hypothesis h, const std::vector<GeRow>& rows, std::size_t n)
{
    std::vector<std::vector<double>> weights;
    std::vector<double> tol;
    for (const auto& r : rows) {
        weights.push_back(r.a);
        tol.push_back(tolerance_for(r));
    }
    const double dn = static_cast<double>(n);
    double total = 0.0;
    for_each_type(n, model.joint(h), weights, [&](double lp, std::span<const double> score) {
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (score[j] / dn < rows[j].b - tol[j]) return;
        }
        total += std::exp(lp);
    });
    return total;
}

struct MarginalType {
    double prob;
    std::vector<double> score;
};

std::vector<MarginalType> marginal_types(std::size_t n, std::span<const double> pmf,
                                         const std::vector<std::vector<double>>& weights)
{
    std::vector<MarginalType> out;
    for_each_type(n, pmf, weights, [&](double lp, std::span<const double> score) {
        out.push_back({std::exp(lp), std::vector<double>(score.begin(), score.end())});
    });
    return out;
}

double marginal_type_pairs(const JointModel& model, Hypothesis h, const std::vector<GeRow>& rows, std::size_t n,
                           std::uint64_t budget)
{
    if (!model.is_product(1e-12)) throw DomainError("marginal-type enumeration needs a product model");
    std::vector<std::vector<double>> wy;
    std::vector<std::vector<double>> wz;
    std::vector<double> tol;
    for (const auto& r : rows) {
        std::vector<double> g;
        std::vector<double> k;
        if (!separate(model, r.a, g, k)) {
            throw DomainError("marginal-type enumeration needs directions of the form g(y) + k(z)");
        }
        wy.push_back(std::move(g));
        wz.push_back(std::move(k));
        tol.push_back(tolerance_for(r));
    }
    const double pairs =
        type_count(n, model.s1_size()) * type_count(n, model.s2_size());
    if (pairs > static_cast<double>(budget) * 64.0) throw BudgetExceeded("marginal-type pair count exceeds the budget");

    const auto ty = marginal_types(n, model.marginal(Observer::One, h), wy);
    auto tz = marginal_types(n, model.marginal(Observer::Two, h), wz);
    const double dn = static_cast<double>(n);
    const std::size_t m = rows.size();

    if (m == 0) return 1.0;
    if (m == 1) {
        // sort z-types by score; suffix sums of probability answer each y-type
        std::sort(tz.begin(), tz.end(),
                  [](const MarginalType& a, const MarginalType& b) { return a.score[0] < b.score[0]; });
        std::vector<double> suffix(tz.size() + 1, 0.0);
        for (std::size_t i = tz.size(); i-- > 0;) suffix[i] = suffix[i + 1] + tz[i].prob;
        std::vector<double> zscore(tz.size());
        for (std::size_t i = 0; i < tz.size(); ++i) zscore[i] = tz[i].score[0];
        double total = 0.0;
        for (const auto& y : ty) {
            // need (y.score + z.score) / n >= b - tol
            const double need = (rows[0].b - tol[0]) * dn - y.score[0];
            const auto it = std::lower_bound(zscore.begin(), zscore.end(), need);
            total += y.prob * suffix[static_cast<std::size_t>(it - zscore.begin())];
        }
        return total;
    }
    double total = 0.0;
    for (const auto& y : ty) {
        double inner = 0.0;
        for (const auto& z : tz) {
            bool in = true;
            for (std::size_t j = 0; j < m && in; ++j) {
                if ((y.score[j] + z.score[j]) / dn < rows[j].b - tol[j]) in = false;
            }
            if (in) inner += z.prob;
        }
        total += y.prob * inner;
    }
    return total;
}

}  // namespace

double type_count(std::size_t n, std::size_t k)
{
    // C(n + k - 1, k - 1)
    double c = 1.0;
    for (std::size_t i = 1; i < k; ++i) c = c * static_cast<double>(n + i) / static_cast<double>(i);
    return std::round(c);
}

double finite_n_exponent(double probability, std::size_t n)
{
    if (n == 0) throw DomainError("exponent needs n >= 1");
    if (!(probability > 0.0)) return std::numeric_limits<double>::infinity();
    return -std::log2(probability) / static_cast<double>(n);
}

double sanov_exact(const JointModel& model, Hypothesis h, std::span<const HalfSpaceConstraint> constraints,
                   std::size_t n, SanovMethod method, std::uint64_t budget)
{
    if (n == 0) throw DomainError("sanov_exact needs n >= 1");
    if (n > kSanovMaxSamples) {
        throw BudgetExceeded("sanov_exact supports n <= " + std::to_string(kSanovMaxSamples));
    }
    const auto rows = ge_rows(constraints, model.cells());
    const bool joint_fits = type_count(n, model.cells()) <= static_cast<double>(budget);
    switch (method) {
    case SanovMethod::JointTypes:
        if (!joint_fits) throw BudgetExceeded("joint type count exceeds the enumeration budget");
        return joint_types(model, h, rows, n);
    case SanovMethod::MarginalTypes: return marginal_type_pairs(model, h, rows, n, budget);
    case SanovMethod::Auto: break;
    }
    if (joint_fits) return joint_types(model, h, rows, n);
    try {
        return marginal_type_pairs(model, h, rows, n, budget);
    } catch (const DomainError& e) {
        throw BudgetExceeded(std::string("joint type count exceeds the budget and ") + e.what());
    }
}

}  // namespace dualobs
