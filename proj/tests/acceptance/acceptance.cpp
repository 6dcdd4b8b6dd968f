// Acceptance suite: one PASS/FAIL line per criterion, CSVs under --out-dir.

#include "fixtures.hpp"
#include "oracles.hpp"
#include "projection_cases.hpp"

#include "dualobs/aggspace.hpp"
#include "dualobs/consensus.hpp"
#include "dualobs/csv.hpp"
#include "dualobs/detect.hpp"
#include "dualobs/error.hpp"
#include "dualobs/exponents.hpp"
#include "dualobs/model_io.hpp"
#include "dualobs/projection.hpp"
#include "dualobs/sanov.hpp"
#include "dualobs/sim.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace dualobs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass) detail << "failed: ";
            else detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

struct Criterion {
    std::string name;
    double time_limit = 0.0;  // seconds, 0 for none
    std::function<void(Outcome&)> body;
};

std::string fmt(double v, int digits = 4)
{
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

double linf(std::span<const double> a, std::span<const double> b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

std::vector<std::uint8_t> bits_of(std::uint32_t code, std::size_t n)
{
    std::vector<std::uint8_t> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>((code >> i) & 1u);
    return b;
}

CsvMetadata metadata(const std::string& kind, const JointModel& m, std::uint64_t seed, std::uint64_t trials)
{
    CsvMetadata meta;
    meta.set("tool", "dualobs acceptance");
    meta.set("kind", kind);
    meta.set("model_hash", std::to_string(model_hash(m.spec())));
    meta.set("seed", std::to_string(seed));
    meta.set("trials", std::to_string(trials));
    return meta;
}

void write_results(const fs::path& path, const CsvMetadata& meta, const std::vector<ResultRow>& rows)
{
    std::ofstream out(path);
    write_results_csv(out, meta, rows);
}

// ---- criteria -------------------------------------------------------------

void kl_anchors(Outcome& o)
{
    const auto t1 = fixtures::table1();
    const auto t2 = fixtures::table2();
    struct Anchor {
        const char* name;
        double value;
        double expect;
    };
    const Anchor anchors[] = {
        {"T1 f1||f0", kl_divergence(t1.joint(Hypothesis::H1), t1.joint(Hypothesis::H0)), 0.7986},
        {"T1 f0||f1", kl_divergence(t1.joint(Hypothesis::H0), t1.joint(Hypothesis::H1)), 0.7057},
        {"T2 f1||f0", kl_divergence(t2.joint(Hypothesis::H1), t2.joint(Hypothesis::H0)), 0.0627},
        {"T2 f0||f1", kl_divergence(t2.joint(Hypothesis::H0), t2.joint(Hypothesis::H1)), 0.0649},
        {"T2 obs1", kl_divergence(t2.marginal(Observer::One, Hypothesis::H1), t2.marginal(Observer::One, Hypothesis::H0)),
         0.0290},
        {"T2 obs2", kl_divergence(t2.marginal(Observer::Two, Hypothesis::H0), t2.marginal(Observer::Two, Hypothesis::H1)),
         0.0244},
    };
    double worst = 0.0;
    for (const auto& a : anchors) {
        const double d = std::abs(a.value - a.expect);
        worst = std::max(worst, d);
        o.require(d <= 5e-4, std::string(a.name) + " = " + fmt(a.value, 6));
    }
    if (o.pass) o.detail << "max deviation " << fmt(worst, 3);
}

void factorization(Outcome& o)
{
    const auto m = fixtures::table1();
    double worst = 0.0;
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
        const auto g = m.marginal(Observer::One, h);
        const auto k = m.marginal(Observer::Two, h);
        for (std::size_t y = 0; y < m.s1_size(); ++y) {
            for (std::size_t z = 0; z < m.s2_size(); ++z) {
                worst = std::max(worst, std::abs(m.joint(h, y, z) - g[y] * k[z]));
            }
        }
    }
    o.require(worst <= 1e-12, "max cell defect " + fmt(worst, 3));
    if (o.pass) o.detail << "max cell defect " << fmt(worst, 3);
}

void decentralized_exceeds_centralized(Outcome& o)
{
    std::vector<std::pair<std::string, JointModel>> models{{"table1", fixtures::table1()}};
    std::mt19937_64 gen(20'240'601);
    for (int i = 0; i < 20; ++i) models.emplace_back("product" + std::to_string(i), fixtures::random_product_model(gen, 4));
    double worst = 1e300;
    for (const auto& [name, m] : models) {
        const double c = optimal_centralized_rate(m).rate;
        const double d = optimal_decentralized_rate(m).rate;
        worst = std::min(worst, d - c);
        o.require(d >= c - 1e-4, name + ": R*_d " + fmt(d, 6) + " < R*_c " + fmt(c, 6));
    }
    if (o.pass) o.detail << models.size() << " models, min(R*_d - R*_c) = " << fmt(worst, 3);
}

void projection_vs_primal(Outcome& o)
{
    std::mt19937_64 gen(5150);
    std::uniform_int_distribution<std::size_t> size(2, 4);
    double rate_err = 0.0;
    double q_err = 0.0;
    double gap = 0.0;
    int count = 0;
    for (int i = 0; i < 50; ++i) {
        const auto m = fixtures::random_joint_model(gen, size(gen), size(gen));
        const auto v = llr_vectors(m);
        const std::vector<cases::Case> work{
            cases::make_case(m.joint(Hypothesis::H0), {v.V}, Sense::AtLeast, gen),
            cases::make_case(m.joint(Hypothesis::H1), {v.V}, Sense::AtMost, gen),
            cases::make_case(m.joint(Hypothesis::H0), {v.v2, v.v3}, Sense::AtLeast, gen),
            cases::make_case(m.joint(Hypothesis::H1), {v.v2, v.v3}, Sense::AtMost, gen)};
        for (const auto& c : work) {
            const auto dual = info_projection(c.f, c.constraints);
            const auto primal = oracles::primal_projection(c.f, c.a, c.b, c.start);
            rate_err = std::max(rate_err, std::abs(dual.rate - primal.rate));
            q_err = std::max(q_err, linf(dual.achiever, primal.q));
            gap = std::max(gap, dual.duality_gap);
            ++count;
        }
    }
    o.require(rate_err <= 1e-6, "rate error " + fmt(rate_err, 3));
    o.require(q_err <= 1e-5, "achiever error " + fmt(q_err, 3));
    o.require(gap <= 1e-6, "duality gap " + fmt(gap, 3));
    o.detail << (o.pass ? "" : "; ") << count << " projections, rate err " << fmt(rate_err, 3) << ", achiever err "
             << fmt(q_err, 3) << ", gap " << fmt(gap, 3);
}

void sanov_envelope(Outcome& o)
{
    const auto m = fixtures::table1();
    const auto v = llr_vectors(m);
    const std::vector<HalfSpaceConstraint> c{{v.V, 0.0, Sense::AtLeast}};
    const double rate = info_projection(m.joint(Hypothesis::H0), c).rate;
    const double k = static_cast<double>(m.cells());
    o.detail << "R = " << fmt(rate, 6);
    for (std::size_t n : {5u, 10u, 20u, 40u}) {
        const double e = finite_n_exponent(sanov_exact(m, Hypothesis::H0, c, n), n);
        const double envelope = (k - 1.0) * std::log2(static_cast<double>(n) + 1.0) / static_cast<double>(n);
        const double gap = std::abs(e - rate);
        o.detail << "; n=" << n << " gap " << fmt(gap, 3) << " <= " << fmt(envelope, 3);
        if (gap > envelope) {
            o.pass = false;
            o.detail << " VIOLATED";
        }
    }
}

// z-scores of the frequentist (H, length-3 prefix) weights against the exact
// aggregated law, over both observers' tries and every prefix of mass >= 0.01.
std::vector<double> frequentist_z_scores(const JointModel& m, std::uint64_t seed)
{
    const std::uint64_t strings = 1'000'000;
    const auto [agg1, agg2] = build_aggregated_model(m, 1.0, 1.0, 3, strings, seed, 1);
    std::vector<double> z;
    for (Observer ob : {Observer::One, Observer::Two}) {
        const auto& agg = ob == Observer::One ? agg1 : agg2;
        const auto exact = exact_aggregated_model(m, ob, 1.0, 1.0, 3);
        oracles::for_each_string(2 * m.alphabet_size(ob), 3, [&](const std::vector<std::size_t>& sym) {
            std::int64_t est = AggregatedModel::kRoot;
            std::int64_t ref = AggregatedModel::kRoot;
            for (std::size_t s : sym) {
                const int d = static_cast<int>(s % 2);
                if (est != AggregatedModel::kNone) est = agg.child(est, s / 2, d);
                if (ref != AggregatedModel::kNone) ref = exact.child(ref, s / 2, d);
            }
            for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
                const double p = ref == AggregatedModel::kNone ? 0.0 : exact.mass(ref, h);
                if (p < 0.01) continue;
                const double count = est == AggregatedModel::kNone ? 0.0 : agg.mass(est, h);
                const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(strings));
                z.push_back((count / static_cast<double>(strings) - p) / se);
            }
        });
    }
    return z;
}

void decision_law_checks(Outcome& o)
{
    double sum_err = 0.0;
    double brute_err = 0.0;
    for (const auto& m : {fixtures::table1(), fixtures::table2()}) {
        for (Observer ob : {Observer::One, Observer::Two}) {
            for (double t : {0.5, 1.0, 2.0}) {
                const auto law = exact_decision_law(m, ob, t, 7);
                for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
                    for (std::size_t n = 0; n <= 7; ++n) {
                        double s = 0.0;
                        for (DecisionCode c = 0; c < (DecisionCode{1} << n); ++c) s += law.probability(h, n, c);
                        sum_err = std::max(sum_err, std::abs(s - 1.0));
                    }
                    for (std::size_t n = 1; n <= 4; ++n) {
                        const auto brute = oracles::brute_decision_law(m, ob, h, t, n);
                        for (DecisionCode c = 0; c < brute.size(); ++c) {
                            brute_err = std::max(brute_err, std::abs(law.probability(h, n, c) - brute[c]));
                        }
                    }
                }
            }
        }
    }
    o.require(sum_err <= 1e-12, "normalization error " + fmt(sum_err, 3));
    o.require(brute_err <= 1e-12, "brute-force error " + fmt(brute_err, 3));

    // frequentist trie weights at 10^6 strings against the exact aggregated law
    const auto m = fixtures::table1();
    const auto z = frequentist_z_scores(m, 31'337);
    double worst_z = 0.0;
    for (double v : z) worst_z = std::max(worst_z, std::abs(v));
    o.require(worst_z <= 3.0, "frequentist deviation " + fmt(worst_z, 3) + " SE");
    o.require(!z.empty(), "no prefixes compared");

    // calibration over independent seeds, reported alongside: counts of
    // |z| > 3 near 0.27% of all comparisons mean the estimator is unbiased
    // and a single exceedance is the multiple-comparison tail
    std::size_t total = 0;
    std::size_t over = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (double v : frequentist_z_scores(m, seed)) {
            ++total;
            if (std::abs(v) > 3.0) ++over;
        }
    }
    o.detail << (o.pass ? "" : "; ") << "sum err " << fmt(sum_err, 3) << ", brute err " << fmt(brute_err, 3) << ", "
             << z.size() << " frequentist prefixes, max " << fmt(worst_z, 3) << " SE; 20-seed calibration " << over
             << "/" << total << " beyond 3 SE (expected " << fmt(0.0027 * static_cast<double>(total), 2) << ")";
}

void alpha_identities(Outcome& o)
{
    // beta = 1 gives the local posterior
    double psi_err = 0.0;
    for (const auto& m : {fixtures::table1(), fixtures::table2()}) {
        for (Observer ob : {Observer::One, Observer::Two}) {
            Rng rng(derive_seed(9, static_cast<std::uint64_t>(ob == Observer::One), 0));
            AlphaState a = AlphaState::initial(m.prior());
            DetectorState d{0.0, 0, scope_of(ob)};
            for (const auto& obs : sample(m, Hypothesis::H1, rng, 50)) {
                const std::size_t x = ob == Observer::One ? obs.y : obs.z;
                a = alpha_update_independent(a, x, BetaValue{1.0, a.n() + 1}, m, ob);
                d = local_update(d, x, m);
                psi_err = std::max(psi_err, std::abs(a.alpha() - posterior(d, m.prior())));
            }
        }
    }
    o.require(psi_err <= 1e-12, "alpha vs psi " + fmt(psi_err, 3));

    std::mt19937_64 gen(404);
    std::vector<JointModel> models{fixtures::table1()};
    for (int i = 0; i < 5; ++i) models.push_back(fixtures::random_product_model(gen, 3));

    // round-1 closed form against the general recursion
    double closed_err = 0.0;
    for (const auto& m : models) {
        for (Observer ob : {Observer::One, Observer::Two}) {
            const auto agg = exact_aggregated_model(m, ob, 1.0, 1.0, 1);
            const auto law = exact_decision_law(m, alternate(ob), 1.0, 1);
            const auto start = AlphaState::initial(m.prior());
            for (std::size_t x = 0; x < m.alphabet_size(ob); ++x) {
                const double psi = posterior(local_update(DetectorState{0.0, 0, scope_of(ob)}, x, m), m.prior());
                for (int d = 0; d < 2; ++d) {
                    const std::vector<std::uint8_t> prefix{static_cast<std::uint8_t>(d)};
                    const double b = beta(law, prefix).beta;
                    const double closed = psi / ((1.0 - b) * psi + b);
                    closed_err = std::max(closed_err, std::abs(alpha_update_general(start, x, d, agg).alpha() - closed));
                }
            }
        }
    }
    o.require(closed_err <= 1e-12, "closed form " + fmt(closed_err, 3));

    // simplified recursion against the general one, n <= 4
    double simple_err = 0.0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& m = models[i];
        const double t1 = i == 0 ? 1.0 : 0.8 + 0.1 * static_cast<double>(i);
        const double t2 = i == 0 ? 1.0 : 1.4 - 0.1 * static_cast<double>(i);
        for (Observer ob : {Observer::One, Observer::Two}) {
            const std::size_t H = 4;
            const auto agg = exact_aggregated_model(m, ob, t1, t2, H);
            const auto law = exact_decision_law(m, alternate(ob), ob == Observer::One ? t2 : t1, H);
            oracles::for_each_string(m.alphabet_size(ob), H, [&](const std::vector<std::size_t>& obs) {
                for (std::uint32_t code = 0; code < (1u << H); ++code) {
                    if (law.probability(Hypothesis::H0, H, code) == 0.0 ||
                        law.probability(Hypothesis::H1, H, code) == 0.0) {
                        continue;
                    }
                    const auto d = bits_of(code, H);
                    AlphaState g = AlphaState::initial(m.prior());
                    AlphaState s = g;
                    for (std::size_t n = 0; n < H; ++n) {
                        g = alpha_update_general(g, obs[n], d[n], agg);
                        s = alpha_update_independent(s, obs[n], beta(law, std::span(d).first(n + 1)), m, ob);
                        simple_err = std::max(simple_err, std::abs(g.alpha() - s.alpha()));
                    }
                }
            });
        }
    }
    o.require(simple_err <= 1e-9, "simplified recursion " + fmt(simple_err, 3));
    o.detail << (o.pass ? "" : "; ") << "beta=1 err " << fmt(psi_err, 3) << ", closed form err " << fmt(closed_err, 3)
             << ", simplified err " << fmt(simple_err, 3);
}

void consensus_behavior(Outcome& o, const fs::path& out_dir)
{
    const auto m = fixtures::table1();
    const std::uint64_t seed = 7;
    ConsensusConfig cfg;
    cfg.t1 = 1.0;
    cfg.t2 = 1.0;
    cfg.max_rounds = 200;
    const auto point = run_consensus_point(m, cfg, {}, 10'000, seed, 0, 1);
    const double termination = 1.0 - static_cast<double>(point.did_not_stop + point.aborted) / point.trials;
    o.require(termination >= 0.999, "termination " + fmt(termination, 5));

    ErrorVsNSpec spec;
    for (std::size_t n = 1; n <= 20; ++n) spec.n_list.push_back(n);
    spec.trials = 100'000;
    spec.seed = seed;
    const auto rows = error_vs_n(m, spec);
    std::vector<double> ns;
    std::vector<double> errs;
    for (const auto& r : rows) {
        if (r.scheme != "decentralized") continue;
        ns.push_back(static_cast<double>(*r.n));
        errs.push_back(r.error);
    }
    const double rho = spearman(ns, errs);
    o.require(rho <= -0.9, "Spearman " + fmt(rho, 4));
    write_results(out_dir / "error_vs_n_table1.csv", metadata("error-vs-n", m, seed, spec.trials), rows);

    // byte-exact replay of traces and result tables, also across worker counts
    auto render = [&](std::size_t workers) {
        std::vector<ConsensusTrace> traces;
        for (std::uint64_t i = 0; i < 200; ++i) traces.push_back(consensus_trial(m, cfg, {}, seed, 0, i));
        std::ostringstream s;
        write_traces_csv(s, metadata("trace", m, seed, 200), traces);
        ErrorVsNSpec small = spec;
        small.trials = 5000;
        small.workers = workers;
        write_results_csv(s, metadata("error-vs-n", m, seed, small.trials), error_vs_n(m, small));
        const auto p = run_consensus_point(m, cfg, {}, 5000, seed, 0, workers);
        write_results_csv(s, metadata("point", m, seed, 5000), std::vector<ResultRow>{p});
        return s.str();
    };
    const std::string first = render(1);
    o.require(first == render(1), "replay differs");
    o.require(first == render(3), "replay differs across worker counts");
    o.detail << (o.pass ? "" : "; ") << "termination " << fmt(termination, 5) << ", Spearman " << fmt(rho, 4)
             << ", replay " << first.size() << " bytes identical";
}

struct Fronts {
    std::vector<ResultRow> rows;
    std::vector<ParetoPoint> sprt, basic, aggregated, ae;
};

Fronts stopping_time_sweep(const JointModel& m, const std::string& name, std::uint64_t seed, const fs::path& out_dir)
{
    StoppingTimeSpec spec;
    spec.trials = 10'000;
    spec.seed = seed;
    ArtifactBuild build;
    build.horizon = 7;
    build.strings = 1'000'000;
    build.seed = seed;
    const auto artifacts = build_artifacts(m, spec.threshold_pairs, build);
    Fronts f;
    f.rows = error_vs_stopping_time(m, spec, artifacts);
    f.sprt = scheme_front(f.rows, "sprt");
    f.basic = scheme_front(f.rows, "basic");
    f.aggregated = scheme_front(f.rows, "aggregated");
    f.ae = scheme_front(f.rows, "accuracy_exchange");
    write_results(out_dir / ("stopping_time_" + name + ".csv"), metadata("stopping-time", m, seed, spec.trials), f.rows);
    return f;
}

double max_time_se(const std::vector<ResultRow>& rows, const std::vector<ParetoPoint>& front)
{
    double s = 0.0;
    for (const auto& p : front) s = std::max(s, rows[p.index].time_se);
    return s;
}

void stopping_time_ordering(Outcome& o, const fs::path& out_dir)
{
    const auto t1 = stopping_time_sweep(fixtures::table1(), "table1", 11, out_dir);

    // SPRT at or below every consensus Pareto point, within 2 combined SE
    int dominated = 0;
    int total = 0;
    for (const auto* front : {&t1.basic, &t1.aggregated, &t1.ae}) {
        for (const auto& p : *front) {
            const auto& r = t1.rows[p.index];
            auto s = interpolate_front(t1.sprt, p.time);
            if (!s && !t1.sprt.empty() && p.time > t1.sprt.back().time) s = t1.sprt.back().error;
            ++total;
            if (!s) continue;
            // both sides are estimates: combine the point's SE with the SPRT SE nearest in time
            double sprt_se = 0.0;
            double nearest = 1e300;
            for (const auto& q : t1.sprt) {
                if (std::abs(q.time - p.time) < nearest) {
                    nearest = std::abs(q.time - p.time);
                    sprt_se = t1.rows[q.index].error_se;
                }
            }
            if (*s <= r.error + 2.0 * std::sqrt(r.error_se * r.error_se + sprt_se * sprt_se)) ++dominated;
        }
    }
    o.require(total > 0 && dominated == total,
              "SPRT dominates " + std::to_string(dominated) + "/" + std::to_string(total) + " points");

    // Algo-3 within its budget at some Algo-2 operating point
    const double se3 = max_time_se(t1.rows, t1.aggregated);
    int matched = 0;
    int better = 0;
    for (const auto& p : t1.basic) {
        const auto& r2 = t1.rows[p.index];
        const double slack = 2.0 * std::sqrt(r2.time_se * r2.time_se + se3 * se3);
        const auto q = best_within_budget(t1.aggregated, p.time + slack);
        if (!q) continue;
        ++matched;
        const auto& r3 = t1.rows[q->index];
        if (r3.error <= r2.error + 2.0 * std::sqrt(r2.error_se * r2.error_se + r3.error_se * r3.error_se)) ++better;
    }
    o.require(better >= 1, "Algo-3 not within 2 SE of Algo-2 at any matched time (" + std::to_string(matched) +
                               " matched)");

    // Table 2: Algo-2 and Algo-3 comparable wherever both fronts reach
    const auto t2 = stopping_time_sweep(fixtures::table2(), "table2", 12, out_dir);
    const double se3b = max_time_se(t2.rows, t2.aggregated);
    const double reach = t2.aggregated.empty() ? -1.0 : t2.aggregated.back().time + 2.0 * se3b;
    int compared = 0;
    int close = 0;
    for (const auto& p : t2.basic) {
        if (p.time > reach) continue;
        const auto& r2 = t2.rows[p.index];
        const double slack = 2.0 * std::sqrt(r2.time_se * r2.time_se + se3b * se3b);
        const auto q = best_within_budget(t2.aggregated, p.time + slack);
        if (!q) continue;
        ++compared;
        const auto& r3 = t2.rows[q->index];
        if (std::abs(r3.error - r2.error) <= 2.0 * std::sqrt(r2.error_se * r2.error_se + r3.error_se * r3.error_se)) {
            ++close;
        }
    }
    o.require(compared >= 1 && close == compared,
              "Table 2 Algo-2 vs Algo-3 within 2 SE at " + std::to_string(close) + "/" + std::to_string(compared));
    o.detail << (o.pass ? "" : "; ") << "SPRT dominates " << dominated << "/" << total << "; Algo-3 <= Algo-2 + 2SE at "
             << better << "/" << matched << " matched times; Table 2 within 2SE at " << close << "/" << compared;

    // exponents alongside the simulation outputs
    for (const auto& [name, m] : {std::pair{std::string("table1"), fixtures::table1()},
                                  std::pair{std::string("table2"), fixtures::table2()}}) {
        const std::vector<ExponentResult> ex{optimal_centralized_rate(m), optimal_decentralized_rate(m)};
        std::ofstream out(out_dir / ("exponents_" + name + ".csv"));
        write_exponents_csv(out, metadata("exponents", m, 0, 0), ex);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance checks"};
    std::string out_dir = "results";
    std::string only;
    app.add_option("--out-dir", out_dir, "directory for CSV outputs");
    app.add_option("--only", only, "run the criteria whose name contains this string");
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    const std::vector<Criterion> criteria{
        {"kl-anchors", 1.0, kl_anchors},
        {"independence-factorization", 0.0, factorization},
        {"decentralized-rate-at-least-centralized", 120.0, decentralized_exceeds_centralized},
        {"projection-vs-primal-oracle", 0.0, projection_vs_primal},
        {"sanov-finite-n-envelope", 60.0, sanov_envelope},
        {"decision-sequence-law", 0.0, decision_law_checks},
        {"alpha-identities", 0.0, alpha_identities},
        {"consensus-behavior", 0.0, [&](Outcome& o) { consensus_behavior(o, dir); }},
        {"stopping-time-ordering", 900.0, [&](Outcome& o) { stopping_time_ordering(o, dir); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && c.name.find(only) == std::string::npos) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " threw: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0.0 && secs > c.time_limit) {
            o.pass = false;
            o.detail << "; took " << fmt(secs, 3) << " s, limit " << c.time_limit << " s";
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail.str() << " [" << std::fixed
                  << std::setprecision(2) << secs << " s]" << std::defaultfloat << std::endl;
        if (!o.pass) ++failed;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
