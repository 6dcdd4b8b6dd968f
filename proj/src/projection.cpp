#include "dualobs/projection.hpp"

#include "dualobs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace dualobs {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kConstantDirectionTol = 1e-13;
constexpr double kFeasibilityTol = 1e-12;
constexpr double kGradientTol = 1e-12;
constexpr double kKktTol = 1e-9;
constexpr double kDivergedMultiplier = 1e8;
constexpr int kMaxNewtonIterations = 500;

// A constraint rewritten as a . Q >= b.
struct GeForm {
    std::vector<double> a;
    double b;
    std::size_t source;
    double sign;  // +1 if the input was >=, -1 if it was <=
};

struct TiltStats {
    double log2_z = 0.0;
    Pmf q;
    std::vector<double> mean;
    std::vector<double> cov;  // m x m row-major
};

TiltStats tilt_stats(std::span<const double> f, const std::vector<const GeForm*>& rows, std::span<const double> mu)
{
    const std::size_t cells = f.size();
    const std::size_t m = rows.size();
    std::vector<double> e(cells);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells; ++i) {
        double v = std::log2(f[i]);
        for (std::size_t j = 0; j < m; ++j) v += mu[j] * rows[j]->a[i];
        e[i] = v;
        top = std::max(top, v);
    }
    TiltStats s;
    s.q.resize(cells);
    double z = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        s.q[i] = std::exp2(e[i] - top);
        z += s.q[i];
    }
    for (double& v : s.q) v /= z;
    s.log2_z = top + std::log2(z);
    s.mean.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < cells; ++i) s.mean[j] += s.q[i] * rows[j]->a[i];
    }
    s.cov.assign(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j; k < m; ++k) {
            double c = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                c += s.q[i] * (rows[j]->a[i] - s.mean[j]) * (rows[k]->a[i] - s.mean[k]);
            }
            s.cov[j * m + k] = c;
            s.cov[k * m + j] = c;
        }
    }
    return s;
}

double dual_value(const std::vector<const GeForm*>& rows, std::span<const double> mu, double log2_z)
{
    double v = -log2_z;
    for (std::size_t j = 0; j < rows.size(); ++j) v += mu[j] * rows[j]->b;
    return v;
}

struct SubsetSolution {
    std::vector<double> mu;
    TiltStats stats;
    double dual = 0.0;
};

// Unconstrained Newton ascent of the dual restricted to the rows in S.
std::optional<SubsetSolution> maximize_dual(std::span<const double> f, const std::vector<const GeForm*>& rows)
{
    const std::size_t m = rows.size();
    std::vector<double> mu(m, 0.0);
    TiltStats st = tilt_stats(f, rows, mu);
    double h = dual_value(rows, mu, st.log2_z);
    double scale = 1.0;
    for (const auto* r : rows) {
        for (double v : r->a) scale = std::max(scale, std::abs(v));
    }
    for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
        std::vector<double> g(m);
        double gnorm = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            g[j] = rows[j]->b - st.mean[j];
            gnorm = std::max(gnorm, std::abs(g[j]));
        }
        if (gnorm <= kGradientTol * scale) return SubsetSolution{mu, std::move(st), h};

        // Newton direction from ln2 * Cov * delta = g.
        std::vector<double> delta(m);
        bool newton = true;
        if (m == 1) {
            const double hdiag = kLn2 * st.cov[0];
            if (hdiag > 1e-300) {
                delta[0] = g[0] / hdiag;
            } else {
                newton = false;
            }
        } else {
            const double a = kLn2 * st.cov[0];
            const double b = kLn2 * st.cov[1];
            const double d = kLn2 * st.cov[3];
            const double det = a * d - b * b;
            if (det > 1e-300 * std::max(1.0, a * d)) {
                delta[0] = (d * g[0] - b * g[1]) / det;
                delta[1] = (a * g[1] - b * g[0]) / det;
            } else {
                newton = false;
            }
        }
        if (!newton) delta = g;
        // Newton step below rounding level: converged as far as doubles allow.
        double dnorm = 0.0;
        for (std::size_t j = 0; j < m; ++j) dnorm = std::max(dnorm, std::abs(delta[j]) / (1.0 + std::abs(mu[j])));
        if (newton && dnorm <= 1e-13) return SubsetSolution{mu, std::move(st), h};

        double slope = 0.0;
        for (std::size_t j = 0; j < m; ++j) slope += g[j] * delta[j];
        double step = 1.0;
        bool improved = false;
        std::vector<double> trial(m);
        TiltStats trial_st;
        double trial_h = h;
        for (int bt = 0; bt < 80; ++bt) {
            for (std::size_t j = 0; j < m; ++j) trial[j] = mu[j] + step * delta[j];
            trial_st = tilt_stats(f, rows, trial);
            trial_h = dual_value(rows, trial, trial_st.log2_z);
            // Once the predicted gain is below the resolution of h, the
            // Armijo test only sees rounding noise; take the Newton step.
            const bool noise = newton && step == 1.0 && slope <= 1e-13 * (1.0 + std::abs(h));
            if (std::isfinite(trial_h) && (noise || trial_h >= h + 1e-4 * step * slope)) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            // No ascent possible at working precision: accept if nearly stationary.
            if (gnorm <= 1e-8) return SubsetSolution{mu, std::move(st), h};
            return std::nullopt;
        }
        mu = trial;
        st = std::move(trial_st);
        h = trial_h;
        for (double v : mu) {
            if (!std::isfinite(v) || std::abs(v) > kDivergedMultiplier) return std::nullopt;
        }
    }
    return std::nullopt;
}

// max over the simplex of min_j c_j . Q for m <= 2, where c_j are slack vectors.
double maximin_over_simplex(const std::vector<std::vector<double>>& c)
{
    if (c.empty()) return std::numeric_limits<double>::infinity();
    if (c.size() == 1) return *std::max_element(c[0].begin(), c[0].end());
    if (c.size() > 2) throw DomainError("at most two constraints are supported");
    const auto& c1 = c[0];
    const auto& c2 = c[1];
    const std::size_t cells = c1.size();
    auto phi = [&](double w) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cells; ++i) best = std::max(best, w * c1[i] + (1.0 - w) * c2[i]);
        return best;
    };
    double value = std::min(phi(0.0), phi(1.0));
    for (std::size_t i = 0; i < cells; ++i) {
        for (std::size_t k = i + 1; k < cells; ++k) {
            // lines l_i(w) = c2_i + w (c1_i - c2_i) cross at w*
            const double slope = (c1[i] - c2[i]) - (c1[k] - c2[k]);
            if (std::abs(slope) < 1e-300) continue;
            const double w = (c2[k] - c2[i]) / slope;
            if (w > 0.0 && w < 1.0) value = std::min(value, phi(w));
        }
    }
    return value;
}

}  // namespace

Pmf tilt(std::span<const double> f, std::span<const std::vector<double>> directions, std::span<const double> mu)
{
    if (directions.size() != mu.size()) throw DomainError("tilt: one multiplier per direction");
    std::vector<GeForm> forms;
    forms.reserve(directions.size());
    for (std::size_t j = 0; j < directions.size(); ++j) {
        if (directions[j].size() != f.size()) throw DomainError("tilt: direction size mismatch");
        forms.push_back({directions[j], 0.0, j, 1.0});
    }
    std::vector<const GeForm*> rows;
    for (const auto& g : forms) rows.push_back(&g);
    return tilt_stats(f, rows, mu).q;
}

double interior_margin(std::span<const HalfSpaceConstraint> constraints)
{
    std::vector<std::vector<double>> slack;
    for (const auto& c : constraints) {
        std::vector<double> s(c.direction.size());
        const double sign = c.sense == Sense::AtLeast ? 1.0 : -1.0;
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = sign * (c.direction[i] - c.offset);
        slack.push_back(std::move(s));
    }
    return maximin_over_simplex(slack);
}

ProjectionResult info_projection(std::span<const double> f, std::span<const HalfSpaceConstraint> constraints)
{
    if (constraints.size() > 2) throw DomainError("info_projection supports at most two constraints");
    for (double v : f) {
        if (!(v > 0.0)) throw SupportError("info_projection needs a strictly positive base PMF");
    }

    ProjectionResult out;
    out.multipliers.assign(constraints.size(), 0.0);
    out.active.assign(constraints.size(), false);

    std::vector<GeForm> forms;
    for (std::size_t j = 0; j < constraints.size(); ++j) {
        const auto& c = constraints[j];
        if (c.direction.size() != f.size()) throw DomainError("constraint direction does not match the PMF size");
        const double sign = c.sense == Sense::AtLeast ? 1.0 : -1.0;
        GeForm g{std::vector<double>(f.size()), sign * c.offset, j, sign};
        for (std::size_t i = 0; i < f.size(); ++i) g.a[i] = sign * c.direction[i];
        const auto [lo, hi] = std::minmax_element(g.a.begin(), g.a.end());
        const double scale = std::max({1.0, std::abs(*lo), std::abs(*hi)});
        if (*hi - *lo <= kConstantDirectionTol * scale) {
            if (*hi >= g.b - kFeasibilityTol * scale) continue;
            throw InfeasibleConstraints("constraint with constant direction cannot be met");
        }
        forms.push_back(std::move(g));
    }

    // f itself feasible: projection is f.
    bool f_feasible = true;
    for (const auto& g : forms) {
        double e = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) e += f[i] * g.a[i];
        if (e < g.b) f_feasible = false;
    }
    if (f_feasible) {
        out.achiever.assign(f.begin(), f.end());
        return out;
    }

    std::vector<std::vector<double>> slack;
    for (const auto& g : forms) {
        std::vector<double> s(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) s[i] = g.a[i] - g.b;
        slack.push_back(std::move(s));
    }
    const double margin = maximin_over_simplex(slack);
    if (!(margin > kFeasibilityTol)) {
        throw InfeasibleConstraints(margin < -kFeasibilityTol ? "constraint set is empty"
                                                              : "constraint set has empty interior");
    }

    std::vector<std::vector<std::size_t>> subsets;
    if (forms.size() == 1) {
        subsets = {{0}};
    } else {
        subsets = {{0}, {1}, {0, 1}};
    }

    std::optional<SubsetSolution> best;
    std::vector<std::size_t> best_subset;
    for (const auto& subset : subsets) {
        std::vector<const GeForm*> rows;
        for (std::size_t j : subset) rows.push_back(&forms[j]);
        auto sol = maximize_dual(f, rows);
        if (!sol) continue;
        bool valid = true;
        for (double v : sol->mu) {
            if (v < -kKktTol) valid = false;
        }
        for (std::size_t j = 0; j < forms.size() && valid; ++j) {
            if (std::find(subset.begin(), subset.end(), j) != subset.end()) continue;
            double e = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) e += sol->stats.q[i] * forms[j].a[i];
            const double scale = std::max(1.0, std::abs(forms[j].b));
            if (e < forms[j].b - kKktTol * scale) valid = false;
        }
        if (!valid) continue;
        if (!best || sol->dual > best->dual) {
            best = std::move(sol);
            best_subset = subset;
        }
    }
    if (!best) throw NonConvergence("information projection: no active set satisfied the optimality conditions");

    out.achiever = best->stats.q;
    out.dual_value = best->dual;
    out.rate = kl_divergence(out.achiever, f);
    out.duality_gap = std::abs(out.rate - out.dual_value);
    for (std::size_t k = 0; k < best_subset.size(); ++k) {
        const std::size_t src = forms[best_subset[k]].source;
        out.multipliers[src] = std::max(0.0, best->mu[k]);
        out.active[src] = true;
    }
    return out;
}

}  // namespace dualobs
