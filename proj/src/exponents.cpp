#include "dualobs/exponents.hpp"

#include "dualobs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dualobs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAxisDegenerateTol = 1e-12;
constexpr double kInteriorTol = 1e-12;

std::pair<double, double> extrema(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return {*lo, *hi};
}

double expectation(std::span<const double> q, const std::vector<double>& v)
{
    double e = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) e += q[i] * v[i];
    return e;
}

// Extremes of obj . Q over {Q in simplex : con . Q (>= | <=) t}, by vertex
// enumeration: feasible simplex vertices plus edge points where the
// constraint is tight. Returns {min, max}; {+inf, -inf} if empty.
std::pair<double, double> lp_range(const std::vector<double>& obj, const std::vector<double>& con, double t,
                                   Sense sense)
{
    const double sign = sense == Sense::AtLeast ? 1.0 : -1.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = kNegInf;
    const std::size_t cells = obj.size();
    auto slack = [&](std::size_t i) { return sign * (con[i] - t); };
    for (std::size_t i = 0; i < cells; ++i) {
        if (slack(i) >= -kInteriorTol) {
            lo = std::min(lo, obj[i]);
            hi = std::max(hi, obj[i]);
        }
    }
    for (std::size_t i = 0; i < cells; ++i) {
        for (std::size_t j = 0; j < cells; ++j) {
            if (!(slack(i) > 0.0 && slack(j) < 0.0)) continue;
            const double theta = (t - con[j]) / (con[i] - con[j]);
            const double v = theta * obj[i] + (1.0 - theta) * obj[j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

bool degenerate_axis(double lo, double hi) { return hi - lo <= kAxisDegenerateTol * std::max(1.0, std::abs(hi)); }

TiltedDistribution make_tilt(const JointModel& model, Hypothesis h, const std::vector<std::vector<double>>& dirs,
                             const std::vector<double>& mu)
{
    TiltedDistribution t;
    t.h = h;
    t.pmf = tilt(model.joint(h), dirs, mu);
    return t;
}

}  // namespace

LlrVectors llr_vectors(const JointModel& model)
{
    LlrVectors out;
    const auto V = model.joint_llr();
    out.V.assign(V.begin(), V.end());
    const auto l1 = model.marginal_llr(Observer::One);
    const auto l2 = model.marginal_llr(Observer::Two);
    out.v2.resize(model.cells());
    out.v3.resize(model.cells());
    for (std::size_t y = 0; y < model.s1_size(); ++y) {
        for (std::size_t z = 0; z < model.s2_size(); ++z) {
            out.v2[model.index(y, z)] = l1[y];
            out.v3[model.index(y, z)] = l2[z];
        }
    }
    std::tie(out.t_l, out.t_u) = extrema(out.V);
    std::tie(out.t1_l, out.t1_u) = extrema(out.v2);
    std::tie(out.t2_l, out.t2_u) = extrema(out.v3);
    return out;
}

TiltedDistribution tilt_centralized(const JointModel& model, Hypothesis h, double tau)
{
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be nonnegative");
    const auto llr = llr_vectors(model);
    // f_h^{1-tau} f_{1-h}^tau = f_h 2^{s tau V}, s = +1 for h = 0, -1 for h = 1
    const double s = h == Hypothesis::H0 ? 1.0 : -1.0;
    auto t = make_tilt(model, h, {llr.V}, {s * tau});
    t.tau = tau;
    return t;
}

TiltedDistribution tilt_decentralized(const JointModel& model, Hypothesis h, double lambda, double sigma)
{
    if (!(lambda >= 0.0) || !(sigma >= 0.0) || !std::isfinite(lambda) || !std::isfinite(sigma)) {
        throw DomainError("lambda and sigma must be nonnegative");
    }
    const auto llr = llr_vectors(model);
    // (f^1_0/f^1_1)^{s lambda} = 2^{-s lambda v2}
    const double s = h == Hypothesis::H0 ? -1.0 : 1.0;
    auto t = make_tilt(model, h, {llr.v2, llr.v3}, {-s * lambda, -s * sigma});
    t.lambda = lambda;
    t.sigma = sigma;
    return t;
}

const char* rate_scheme_name(RateScheme s) { return s == RateScheme::Centralized ? "centralized" : "decentralized"; }

ExponentResult centralized_rate_log2(const JointModel& model, double log2_t)
{
    const auto llr = llr_vectors(model);
    if (!(log2_t > llr.t_l && log2_t < llr.t_u)) {
        throw ThresholdOutOfRange("log2 T must lie strictly between the joint LLR extremes");
    }
    const HalfSpaceConstraint fa_c{llr.V, log2_t, Sense::AtLeast};
    const HalfSpaceConstraint miss_c{llr.V, log2_t, Sense::AtMost};
    const auto fa = info_projection(model.joint(Hypothesis::H0), std::span(&fa_c, 1));
    const auto miss = info_projection(model.joint(Hypothesis::H1), std::span(&miss_c, 1));
    ExponentResult r;
    r.scheme = RateScheme::Centralized;
    r.log2_t1 = log2_t;
    r.rate_fa = fa.rate;
    r.rate_miss = miss.rate;
    r.rate = std::min(fa.rate, miss.rate);
    r.achiever0 = fa.achiever;
    r.achiever1 = miss.achiever;
    r.lambda0 = fa.multipliers[0];
    r.lambda1 = miss.multipliers[0];
    r.duality_gap = std::max(fa.duality_gap, miss.duality_gap);
    return r;
}

ExponentResult centralized_rate(const JointModel& model, double lr_threshold)
{
    if (!(lr_threshold > 0.0) || !std::isfinite(lr_threshold)) throw DomainError("threshold must be positive");
    return centralized_rate_log2(model, std::log2(lr_threshold));
}

ExponentResult optimal_centralized_rate(const JointModel& model)
{
    const auto llr = llr_vectors(model);
    // E_f0[V] = -D(f0||f1) and E_f1[V] = D(f1||f0): the false-alarm exponent
    // vanishes at the left end, the miss exponent at the right end.
    double lo = expectation(model.joint(Hypothesis::H0), llr.V);
    double hi = expectation(model.joint(Hypothesis::H1), llr.V);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto r = centralized_rate_log2(model, mid);
        if (r.rate_fa < r.rate_miss) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return centralized_rate_log2(model, 0.5 * (lo + hi));
}

ThresholdWindow threshold_window(const JointModel& model, double lr_threshold_2)
{
    if (!(lr_threshold_2 > 0.0)) throw DomainError("threshold must be positive");
    const auto llr = llr_vectors(model);
    const double t = std::log2(lr_threshold_2);
    if (!(t > llr.t2_l && t < llr.t2_u)) {
        throw ThresholdOutOfRange("log2 T2 must lie strictly between observer 2's LLR extremes");
    }
    const auto [lo, hi] = lp_range(llr.v2, llr.v3, t, Sense::AtLeast);
    return {lo, hi};
}

ExponentResult decentralized_rate_log2(const JointModel& model, double log2_t1, double log2_t2)
{
    const auto llr = llr_vectors(model);
    const bool deg1 = degenerate_axis(llr.t1_l, llr.t1_u);
    const bool deg2 = degenerate_axis(llr.t2_l, llr.t2_u);
    auto check_axis = [](bool deg, double lo, double hi, double t, const char* name) {
        if (deg) {
            if (std::abs(t - lo) > kAxisDegenerateTol * std::max(1.0, std::abs(lo))) {
                throw InfeasibleThresholds(std::string(name) + " must equal the constant marginal LLR");
            }
        } else if (!(t > lo && t < hi)) {
            throw InfeasibleThresholds(std::string(name) + " must lie strictly between the marginal LLR extremes");
        }
    };
    check_axis(deg1, llr.t1_l, llr.t1_u, log2_t1, "log2 T1");
    check_axis(deg2, llr.t2_l, llr.t2_u, log2_t2, "log2 T2");

    std::vector<HalfSpaceConstraint> fa_c;
    std::vector<HalfSpaceConstraint> miss_c;
    if (!deg1) {
        fa_c.push_back({llr.v2, log2_t1, Sense::AtLeast});
        miss_c.push_back({llr.v2, log2_t1, Sense::AtMost});
    }
    if (!deg2) {
        fa_c.push_back({llr.v3, log2_t2, Sense::AtLeast});
        miss_c.push_back({llr.v3, log2_t2, Sense::AtMost});
    }
    if (!(interior_margin(fa_c) > kInteriorTol) || !(interior_margin(miss_c) > kInteriorTol)) {
        throw InfeasibleThresholds("agreement regions for these thresholds have empty interior");
    }
    ProjectionResult fa;
    ProjectionResult miss;
    try {
        fa = info_projection(model.joint(Hypothesis::H0), fa_c);
        miss = info_projection(model.joint(Hypothesis::H1), miss_c);
    } catch (const InfeasibleConstraints& e) {
        throw InfeasibleThresholds(e.what());
    }
    ExponentResult r;
    r.scheme = RateScheme::Decentralized;
    r.log2_t1 = log2_t1;
    r.log2_t2 = log2_t2;
    r.rate_fa = fa.rate;
    r.rate_miss = miss.rate;
    r.rate = std::min(fa.rate, miss.rate);
    r.achiever0 = fa.achiever;
    r.achiever1 = miss.achiever;
    std::size_t k = 0;
    if (!deg1) {
        r.lambda0 = fa.multipliers[k];
        r.lambda1 = miss.multipliers[k];
        ++k;
    }
    if (!deg2) {
        r.sigma0 = fa.multipliers[k];
        r.sigma1 = miss.multipliers[k];
    }
    r.duality_gap = std::max(fa.duality_gap, miss.duality_gap);
    return r;
}

ExponentResult decentralized_rate(const JointModel& model, double lr_threshold_1, double lr_threshold_2)
{
    if (!(lr_threshold_1 > 0.0) || !(lr_threshold_2 > 0.0)) throw DomainError("thresholds must be positive");
    return decentralized_rate_log2(model, std::log2(lr_threshold_1), std::log2(lr_threshold_2));
}

ExponentResult optimal_decentralized_rate(const JointModel& model, const DecentralizedSearch& search)
{
    if (search.grid_points < 2) throw DomainError("threshold grid needs at least two points per axis");
    const auto llr = llr_vectors(model);
    const bool deg1 = degenerate_axis(llr.t1_l, llr.t1_u);
    const bool deg2 = degenerate_axis(llr.t2_l, llr.t2_u);

    // The inner axis is solved by bisection, the outer one searched. Pick the
    // inner axis to be a non-degenerate one.
    const bool inner_is_1 = !deg1;
    const std::vector<double>& v_in = inner_is_1 ? llr.v2 : llr.v3;
    const std::vector<double>& v_out = inner_is_1 ? llr.v3 : llr.v2;
    const double in_l = inner_is_1 ? llr.t1_l : llr.t2_l;
    const double in_u = inner_is_1 ? llr.t1_u : llr.t2_u;
    const double out_l = inner_is_1 ? llr.t2_l : llr.t1_l;
    const double out_u = inner_is_1 ? llr.t2_u : llr.t1_u;
    const bool deg_in = inner_is_1 ? deg1 : deg2;
    const bool deg_out = inner_is_1 ? deg2 : deg1;

    auto evaluate = [&](double t_in, double t_out) -> std::optional<ExponentResult> {
        try {
            return inner_is_1 ? decentralized_rate_log2(model, t_in, t_out)
                              : decentralized_rate_log2(model, t_out, t_in);
        } catch (const InfeasibleThresholds&) {
            return std::nullopt;
        }
    };

    if (deg_in) {
        // No informative marginal at all: agreement carries no information.
        auto r = evaluate(in_l, out_l);
        if (!r) throw InfeasibleThresholds("no feasible decentralized operating point");
        return *r;
    }

    // Feasible inner range for a given outer threshold: the fa region needs
    // t_in below max v_in over {v_out >= t_out}, the miss region needs t_in
    // above min v_in over {v_out <= t_out}.
    auto inner_range = [&](double t_out) -> std::pair<double, double> {
        const double hi = lp_range(v_in, v_out, t_out, Sense::AtLeast).second;
        const double lo = lp_range(v_in, v_out, t_out, Sense::AtMost).first;
        return {std::max(in_l, lo) + search.margin, std::min(in_u, hi) - search.margin};
    };

    struct Best {
        double value = kNegInf;
        std::optional<ExponentResult> result;
        void offer(const std::optional<ExponentResult>& r)
        {
            if (r && r->rate > value) {
                value = r->rate;
                result = r;
            }
        }
    };

    // max over t_in of min(fa, miss) at fixed t_out; fa rises and miss falls
    // in t_in, so the optimum is their crossing or an endpoint.
    auto solve_inner = [&](double t_out) -> std::optional<ExponentResult> {
        auto [a, b] = inner_range(t_out);
        if (!(a < b)) return std::nullopt;
        auto ra = evaluate(a, t_out);
        auto rb = evaluate(b, t_out);
        if (!ra || !rb) {
            Best best;
            best.offer(ra);
            best.offer(rb);
            return best.result;
        }
        if (ra->rate_fa >= ra->rate_miss) return ra;
        if (rb->rate_fa <= rb->rate_miss) return rb;
        for (int it = 0; it < 200 && b - a > search.tolerance * 1e-2; ++it) {
            const double mid = 0.5 * (a + b);
            auto rm = evaluate(mid, t_out);
            if (!rm) break;
            if (rm->rate_fa < rm->rate_miss) {
                a = mid;
                ra = rm;
            } else {
                b = mid;
                rb = rm;
            }
        }
        return ra->rate >= rb->rate ? ra : rb;
    };

    Best best;
    if (deg_out) {
        best.offer(solve_inner(out_l));
        if (!best.result) throw InfeasibleThresholds("no feasible decentralized operating point");
        return *best.result;
    }

    // Coarse grid over both axes.
    const std::size_t g = search.grid_points;
    const double glo_in = in_l + search.margin;
    const double ghi_in = in_u - search.margin;
    const double glo_out = out_l + search.margin;
    const double ghi_out = out_u - search.margin;
    auto grid_at = [&](double lo, double hi, std::size_t i) {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g - 1);
    };
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < g; ++j) {
        const double t_out = grid_at(glo_out, ghi_out, j);
        for (std::size_t i = 0; i < g; ++i) {
            const double before = best.value;
            best.offer(evaluate(grid_at(glo_in, ghi_in, i), t_out));
            if (best.value > before) best_j = j;
        }
    }

    // Refinement: golden section over the outer axis around the best grid
    // row, with the inner axis solved exactly.
    auto outer_value = [&](double t_out) {
        auto r = solve_inner(t_out);
        best.offer(r);
        return r ? r->rate : kNegInf;
    };
    double a = grid_at(glo_out, ghi_out, best_j == 0 ? 0 : best_j - 1);
    double b = grid_at(glo_out, ghi_out, std::min(g - 1, best_j + 1));
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = outer_value(x1);
    double f2 = outer_value(x2);
    for (int it = 0; it < 200 && b - a > search.tolerance; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = outer_value(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = outer_value(x1);
        }
    }
    outer_value(0.5 * (a + b));
    if (!best.result) throw InfeasibleThresholds("no feasible decentralized operating point");
    return *best.result;
}

double error_bound(double rate)
{
    if (!(rate > 0.0)) throw DomainError("error bound needs a positive rate");
    return 1.0 / (std::exp2(rate) - 1.0);
}

double recover_centralized_threshold(const JointModel& model, std::span<const double> achiever)
{
    if (achiever.size() != model.cells()) throw DomainError("achiever size does not match the model");
    return expectation(achiever, llr_vectors(model).V);
}

std::pair<double, double> recover_decentralized_thresholds(const JointModel& model, std::span<const double> achiever)
{
    if (achiever.size() != model.cells()) throw DomainError("achiever size does not match the model");
    const auto llr = llr_vectors(model);
    return {expectation(achiever, llr.v2), expectation(achiever, llr.v3)};
}

}  // namespace dualobs
