#include "dualobs/sim.hpp"

#include "dualobs/error.hpp"
#include "dualobs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dualobs {

namespace {

constexpr std::uint64_t kTrialsPerTask = 256;
constexpr std::uint64_t kSprtStreamBase = 1'000'000;
constexpr std::uint64_t kConsensusStreamBase = 2'000'000;
constexpr std::uint64_t kErrorVsNStream = 3'000'000;

std::uint64_t task_count(std::uint64_t trials) { return (trials + kTrialsPerTask - 1) / kTrialsPerTask; }

// Integer tallies of a sequential operating point; summing them is order-free.
struct SequentialTally {
    std::uint64_t stopped = 0;
    std::uint64_t wrong = 0;
    std::uint64_t did_not_stop = 0;
    std::uint64_t aborted = 0;
    std::uint64_t time_sum = 0;
    std::uint64_t time_sq_sum = 0;

    void add_stop(std::size_t t, bool correct)
    {
        ++stopped;
        if (!correct) ++wrong;
        time_sum += t;
        time_sq_sum += static_cast<std::uint64_t>(t) * t;
    }

    SequentialTally& operator+=(const SequentialTally& o)
    {
        stopped += o.stopped;
        wrong += o.wrong;
        did_not_stop += o.did_not_stop;
        aborted += o.aborted;
        time_sum += o.time_sum;
        time_sq_sum += o.time_sq_sum;
        return *this;
    }
};

template <typename Trial>
SequentialTally tally_trials(std::uint64_t trials, std::size_t workers, Trial&& trial)
{
    const std::uint64_t tasks = task_count(trials);
    std::vector<SequentialTally> parts(tasks);
    parallel_for(tasks, workers, [&](std::size_t t) {
        const std::uint64_t begin = t * kTrialsPerTask;
        const std::uint64_t end = std::min(trials, begin + kTrialsPerTask);
        for (std::uint64_t i = begin; i < end; ++i) trial(i, parts[t]);
    });
    SequentialTally total;
    for (const auto& p : parts) total += p;
    return total;
}

void fill_sequential(ResultRow& row, const SequentialTally& t, std::uint64_t trials)
{
    row.trials = trials;
    row.denominator = t.stopped;
    row.did_not_stop = t.did_not_stop;
    row.aborted = t.aborted;
    if (t.stopped > 0) {
        const double n = static_cast<double>(t.stopped);
        row.error = static_cast<double>(t.wrong) / n;
        row.mean_time = static_cast<double>(t.time_sum) / n;
        const double var = std::max(0.0, static_cast<double>(t.time_sq_sum) / n - row.mean_time * row.mean_time);
        row.time_se = std::sqrt(var / n);
    }
    row.error_se = binomial_se(row.error, t.stopped);
    row.low_confidence = t.stopped < kLowConfidenceDenominator;
}

const char* scheme_label(Scheme s)
{
    switch (s) {
    case Scheme::Basic: return "Algo-2";
    case Scheme::Aggregated: return "Algo-3";
    case Scheme::AccuracyExchange: return "Algo-4";
    }
    return "";
}

std::vector<double> average_ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double binomial_se(double p, std::uint64_t trials)
{
    if (trials == 0) return 0.0;
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

std::vector<ResultRow> error_vs_n(const JointModel& model, const ErrorVsNSpec& spec)
{
    if (spec.trials == 0) throw EmptyBudget("error_vs_n needs at least one trial");
    if (spec.n_list.empty()) throw EmptyBudget("error_vs_n needs at least one n");
    for (std::size_t n : spec.n_list) {
        if (n == 0) throw DomainError("sample counts must be at least 1");
    }
    const double tc = spec.central_threshold.value_or(model.costs().center.threshold());
    const double log2_tc = ThresholdPolicy(tc).log2_threshold();
    const double log2_t1 = ThresholdPolicy(spec.t1).log2_threshold();
    const double log2_t2 = ThresholdPolicy(spec.t2).log2_threshold();
    const std::size_t n_max = *std::max_element(spec.n_list.begin(), spec.n_list.end());
    const std::size_t k = spec.n_list.size();

    // per n: centralized wrong, agree, agree-wrong
    struct Counts {
        std::vector<std::uint64_t> central_wrong, agree, agree_wrong;
    };
    const std::uint64_t tasks = task_count(spec.trials);
    std::vector<Counts> parts(tasks);
    const JointSampler sampler(model);
    const auto V = model.joint_llr();
    const auto l1 = model.marginal_llr(Observer::One);
    const auto l2 = model.marginal_llr(Observer::Two);
    const double p1 = model.prior().p1;

    // position of each n in n_list, indexed by n
    std::vector<std::vector<std::size_t>> slots(n_max + 1);
    for (std::size_t i = 0; i < k; ++i) slots[spec.n_list[i]].push_back(i);

    parallel_for(tasks, spec.workers, [&](std::size_t t) {
        Counts& c = parts[t];
        c.central_wrong.assign(k, 0);
        c.agree.assign(k, 0);
        c.agree_wrong.assign(k, 0);
        const std::uint64_t begin = t * kTrialsPerTask;
        const std::uint64_t end = std::min(spec.trials, begin + kTrialsPerTask);
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            Rng rng(derive_seed(spec.seed, kErrorVsNStream, trial));
            const Hypothesis h = hypothesis_from(rng.bernoulli(p1));
            double lc = 0.0;
            double a = 0.0;
            double b = 0.0;
            for (std::size_t n = 1; n <= n_max; ++n) {
                const ObservationPair obs = sampler.draw(h, rng);
                lc += V[model.index(obs.y, obs.z)];
                a += l1[obs.y];
                b += l2[obs.z];
                if (slots[n].empty()) continue;
                const Hypothesis dc = hypothesis_from(decide_log2(lc, log2_tc));
                const bool d1 = decide_log2(a, log2_t1);
                const bool d2 = decide_log2(b, log2_t2);
                for (std::size_t s : slots[n]) {
                    if (dc != h) ++c.central_wrong[s];
                    if (d1 == d2) {
                        ++c.agree[s];
                        if (hypothesis_from(d1) != h) ++c.agree_wrong[s];
                    }
                }
            }
        }
    });

    Counts total{std::vector<std::uint64_t>(k, 0), std::vector<std::uint64_t>(k, 0),
                 std::vector<std::uint64_t>(k, 0)};
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < k; ++i) {
            total.central_wrong[i] += p.central_wrong[i];
            total.agree[i] += p.agree[i];
            total.agree_wrong[i] += p.agree_wrong[i];
        }
    }

    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < k; ++i) {
        ResultRow r;
        r.scheme = "centralized";
        r.label = "Algo-1";
        r.n = spec.n_list[i];
        r.mean_time = static_cast<double>(spec.n_list[i]);
        r.trials = spec.trials;
        r.denominator = spec.trials;
        r.error = static_cast<double>(total.central_wrong[i]) / static_cast<double>(spec.trials);
        r.error_se = binomial_se(r.error, spec.trials);
        r.low_confidence = r.denominator < kLowConfidenceDenominator;
        r.t1 = tc;
        r.seed = spec.seed;
        rows.push_back(r);
    }
    for (std::size_t i = 0; i < k; ++i) {
        ResultRow r;
        r.scheme = "decentralized";
        r.label = "Algo-2";
        r.n = spec.n_list[i];
        r.mean_time = static_cast<double>(spec.n_list[i]);
        r.trials = spec.trials;
        r.denominator = total.agree[i];
        r.error = total.agree[i] > 0
                      ? static_cast<double>(total.agree_wrong[i]) / static_cast<double>(total.agree[i])
                      : 0.0;
        r.error_se = binomial_se(r.error, total.agree[i]);
        r.low_confidence = r.denominator < kLowConfidenceDenominator;
        r.t1 = spec.t1;
        r.t2 = spec.t2;
        r.seed = spec.seed;
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::pair<double, double>> standard_threshold_sweep()
{
    std::vector<std::pair<double, double>> out{{1.0, 1.0}};
    for (int k = 2; k <= 7; ++k) {
        const double kd = static_cast<double>(k);
        out.emplace_back(kd, 1.0 / kd);
        out.emplace_back(1.0 / kd, kd);
    }
    return out;
}

std::vector<PairArtifacts> build_artifacts(const JointModel& model,
                                           const std::vector<std::pair<double, double>>& pairs,
                                           const ArtifactBuild& build)
{
    std::vector<PairArtifacts> out(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [t1, t2] = pairs[i];
        if (build.aggregated) {
            auto [a1, a2] = build_aggregated_model(model, t1, t2, build.horizon, build.strings,
                                                   derive_seed(build.seed, 0xa99ULL, i), build.workers);
            out[i].agg1 = std::make_shared<const AggregatedModel>(std::move(a1));
            out[i].agg2 = std::make_shared<const AggregatedModel>(std::move(a2));
        }
        if (build.decision_laws) {
            out[i].law1 = std::make_shared<const DecisionSequenceDistribution>(
                exact_decision_law(model, Observer::One, t1, build.horizon));
            out[i].law2 = std::make_shared<const DecisionSequenceDistribution>(
                exact_decision_law(model, Observer::Two, t2, build.horizon));
        }
    }
    return out;
}

ConsensusTrace consensus_trial(const JointModel& model, const ConsensusConfig& config, const PairArtifacts& artifacts,
                               std::uint64_t seed, std::uint64_t stream, std::uint64_t trial)
{
    Rng rng(derive_seed(seed, stream, trial));
    const Hypothesis h = hypothesis_from(rng.bernoulli(model.prior().p1));
    return run_consensus(model, config, {artifacts.agg1.get(), artifacts.agg2.get()},
                         {artifacts.law1.get(), artifacts.law2.get()}, h, rng);
}

ResultRow run_consensus_point(const JointModel& model, const ConsensusConfig& config, const PairArtifacts& artifacts,
                              std::uint64_t trials, std::uint64_t seed, std::uint64_t stream, std::size_t workers)
{
    if (trials == 0) throw EmptyBudget("operating point needs at least one trial");
    check_config(config);
    ConsensusConfig cfg = config;
    cfg.record_rounds = false;
    const AggregatedPair agg{artifacts.agg1.get(), artifacts.agg2.get()};
    const DecisionLawPair laws{artifacts.law1.get(), artifacts.law2.get()};
    if (cfg.scheme == Scheme::Aggregated && (!agg.observer1 || !agg.observer2)) {
        throw MissingAggModel("aggregated models missing for this threshold pair");
    }
    if (cfg.scheme == Scheme::AccuracyExchange && (!laws.observer1 || !laws.observer2)) {
        throw MissingDecisionLaw("decision laws missing for this threshold pair");
    }
    const auto tally = tally_trials(trials, workers, [&](std::uint64_t i, SequentialTally& t) {
        const auto trace = consensus_trial(model, cfg, artifacts, seed, stream, i);
        if (trace.aborted) {
            ++t.aborted;
        } else if (!trace.stopping_time) {
            ++t.did_not_stop;
        } else {
            t.add_stop(*trace.stopping_time, trace.correct());
        }
    });
    ResultRow row;
    row.scheme = scheme_name(cfg.scheme);
    row.label = scheme_label(cfg.scheme);
    row.t1 = cfg.t1;
    row.t2 = cfg.t2;
    if (cfg.scheme != Scheme::Basic) {
        row.t3 = cfg.t3;
        row.t4 = cfg.t4;
    }
    row.seed = seed;
    fill_sequential(row, tally, trials);
    return row;
}

ResultRow run_sprt_point(const JointModel& model, const SprtPolicy& policy, std::size_t max_samples,
                         std::uint64_t trials, std::uint64_t seed, std::uint64_t stream, std::size_t workers)
{
    if (trials == 0) throw EmptyBudget("operating point needs at least one trial");
    const JointSampler sampler(model);
    const double p1 = model.prior().p1;
    const auto tally = tally_trials(trials, workers, [&](std::uint64_t i, SequentialTally& t) {
        Rng rng(derive_seed(seed, stream, i));
        const Hypothesis h = hypothesis_from(rng.bernoulli(p1));
        const auto run = run_sprt(model, sampler, policy, max_samples, h, rng);
        t.add_stop(run.stopping_time, run.decision == h);
    });
    ResultRow row;
    row.scheme = "sprt";
    row.label = "Algo-1";
    row.sprt_lower = policy.lower;
    row.sprt_upper = policy.upper;
    row.sprt_cap = max_samples;
    row.seed = seed;
    fill_sequential(row, tally, trials);
    return row;
}

std::vector<ResultRow> error_vs_stopping_time(const JointModel& model, const StoppingTimeSpec& spec,
                                              const std::vector<PairArtifacts>& artifacts)
{
    if (spec.trials == 0) throw EmptyBudget("stopping-time sweep needs at least one trial per point");
    if ((spec.aggregated || spec.accuracy_exchange) && artifacts.size() != spec.threshold_pairs.size()) {
        throw MissingArtifact("one artifact set per threshold pair is required");
    }
    for (std::size_t i = 0; i < artifacts.size() && i < spec.threshold_pairs.size(); ++i) {
        if (spec.aggregated && (!artifacts[i].agg1 || !artifacts[i].agg2)) {
            throw MissingAggModel("aggregated models missing for threshold pair " + std::to_string(i));
        }
        if (spec.accuracy_exchange && (!artifacts[i].law1 || !artifacts[i].law2)) {
            throw MissingDecisionLaw("decision laws missing for threshold pair " + std::to_string(i));
        }
    }

    std::vector<ResultRow> rows;
    if (spec.sprt) {
        rows.push_back(run_sprt_point(model, SprtPolicy(0.5, 2.0), 1, spec.trials, spec.seed, kSprtStreamBase,
                                      spec.workers));
        for (std::size_t i = 0; i < spec.sprt_targets.size(); ++i) {
            const double a = spec.sprt_targets[i];
            rows.push_back(run_sprt_point(model, SprtPolicy::from_error_targets(a, a), spec.sprt_max_samples,
                                          spec.trials, spec.seed, kSprtStreamBase + 1 + i, spec.workers));
        }
    }
    const PairArtifacts none;
    for (std::size_t p = 0; p < spec.threshold_pairs.size(); ++p) {
        const auto [t1, t2] = spec.threshold_pairs[p];
        // Every consensus scheme at this pair sees the same sample paths.
        const std::uint64_t stream = kConsensusStreamBase + p;
        const PairArtifacts& art = p < artifacts.size() ? artifacts[p] : none;
        ConsensusConfig cfg;
        cfg.t1 = t1;
        cfg.t2 = t2;
        cfg.max_rounds = spec.max_rounds;
        if (spec.basic) {
            cfg.scheme = Scheme::Basic;
            rows.push_back(run_consensus_point(model, cfg, art, spec.trials, spec.seed, stream, spec.workers));
        }
        for (const Scheme s : {Scheme::Aggregated, Scheme::AccuracyExchange}) {
            if (s == Scheme::Aggregated && !spec.aggregated) continue;
            if (s == Scheme::AccuracyExchange && !spec.accuracy_exchange) continue;
            cfg.scheme = s;
            for (double a : spec.alpha_thresholds) {
                cfg.t3 = a;
                cfg.t4 = a;
                rows.push_back(run_consensus_point(model, cfg, art, spec.trials, spec.seed, stream, spec.workers));
            }
        }
    }

    for (const char* s : {"sprt", "basic", "aggregated", "accuracy_exchange"}) {
        for (const auto& pt : scheme_front(rows, s)) rows[pt.index].pareto = true;
    }
    return rows;
}

std::vector<ParetoPoint> pareto_filter(std::vector<ParetoPoint> points)
{
    std::sort(points.begin(), points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.error != b.error) return a.error < b.error;
        return a.index < b.index;
    });
    std::vector<ParetoPoint> front;
    for (const auto& p : points) {
        // sorted by time, so p is dominated iff some earlier point has error <= p.error
        if (!front.empty() && front.back().error <= p.error) continue;
        front.push_back(p);
    }
    return front;
}

std::optional<double> interpolate_front(const std::vector<ParetoPoint>& front, double time)
{
    if (front.empty() || time < front.front().time || time > front.back().time) return std::nullopt;
    for (std::size_t i = 0; i + 1 < front.size(); ++i) {
        const auto& a = front[i];
        const auto& b = front[i + 1];
        if (time >= a.time && time <= b.time) {
            if (b.time == a.time) return std::min(a.error, b.error);
            const double w = (time - a.time) / (b.time - a.time);
            return a.error + w * (b.error - a.error);
        }
    }
    return front.back().error;
}

std::optional<ParetoPoint> best_within_budget(const std::vector<ParetoPoint>& front, double time)
{
    std::optional<ParetoPoint> best;
    for (const auto& p : front) {
        if (p.time > time) break;
        best = p;
    }
    return best;
}

std::vector<ParetoPoint> scheme_front(const std::vector<ResultRow>& rows, const std::string& scheme)
{
    std::vector<ParetoPoint> pts;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].scheme != scheme || rows[i].denominator == 0) continue;
        pts.push_back({rows[i].mean_time, rows[i].error, i});
    }
    return pareto_filter(std::move(pts));
}

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman needs two equal-length series");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace dualobs
