#include "cli.hpp"

#include "dualobs/aggspace.hpp"
#include "dualobs/consensus.hpp"
#include "dualobs/csv.hpp"
#include "dualobs/error.hpp"
#include "dualobs/exponents.hpp"
#include "dualobs/model_io.hpp"
#include "dualobs/parallel.hpp"
#include "dualobs/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace dualobs::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string join(std::span<const double> v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += format_number(v[i]);
    }
    return s;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path);
    if (!in) return {};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Missing, typename T>
T load_artifact(const std::string& path, T (*parse)(const std::string&))
{
    if (path.empty() || !fs::exists(path)) throw Missing("artifact not found: " + (path.empty() ? "<unset>" : path));
    return parse(read_text(path));
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

// Config hash: FNV-1a over "key=value" lines in a fixed order.
class ConfigDigest {
public:
    ConfigDigest& add(const std::string& key, const std::string& value)
    {
        text_ += key + "=" + value + "\n";
        return *this;
    }
    ConfigDigest& add(const std::string& key, double value) { return add(key, format_number(value)); }
    ConfigDigest& add_u(const std::string& key, std::uint64_t value) { return add(key, std::to_string(value)); }
    std::string hex() const { return hex64(fnv1a64(text_)); }

private:
    std::string text_;
};

CsvMetadata base_meta(const std::string& command, const JointModelSpec& spec, const ConfigDigest& digest)
{
    CsvMetadata m;
    m.set("tool", "dualobs");
    m.set("command", command);
    m.set("model_hash", hex64(model_hash(spec)));
    m.set("config_hash", digest.hex());
    return m;
}

// Output sink: a file when --out is given, else the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : use_file_(!path.empty())
    {
        if (use_file_) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ConfigError("cannot write " + path);
        }
        stream_ = use_file_ ? static_cast<std::ostream*>(&file_) : &fallback;
    }
    std::ostream& stream() { return *stream_; }

private:
    bool use_file_;
    std::ofstream file_;
    std::ostream* stream_;
};

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("not a number in list: '" + item + "'");
        }
    }
    return out;
}

std::string pair_prefix(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "pair%02zu_", i);
    return buf;
}

// ---------------------------------------------------------------------------

struct ValidateOpts {
    std::string model;
    bool json = false;
};

int cmd_validate(const ValidateOpts& o, std::ostream& out)
{
    const JointModelSpec raw = read_model_file(o.model);
    const JointModel m = validate_model(raw);
    const JointModelSpec spec = m.spec();
    const double d10 = kl_divergence(m.joint(Hypothesis::H1), m.joint(Hypothesis::H0));
    const double d01 = kl_divergence(m.joint(Hypothesis::H0), m.joint(Hypothesis::H1));
    double dm[2][2];
    for (int o_idx = 0; o_idx < 2; ++o_idx) {
        const Observer ob = o_idx == 0 ? Observer::One : Observer::Two;
        dm[o_idx][0] = kl_divergence(m.marginal(ob, Hypothesis::H1), m.marginal(ob, Hypothesis::H0));
        dm[o_idx][1] = kl_divergence(m.marginal(ob, Hypothesis::H0), m.marginal(ob, Hypothesis::H1));
    }
    if (o.json) {
        json j = json::parse(model_to_json(spec, -1));
        j["model_hash"] = hex64(model_hash(spec));
        j["marginals"] = {
            {"observer1", {{"h0", marginal(m, Observer::One, Hypothesis::H0)},
                           {"h1", marginal(m, Observer::One, Hypothesis::H1)}}},
            {"observer2", {{"h0", marginal(m, Observer::Two, Hypothesis::H0)},
                           {"h1", marginal(m, Observer::Two, Hypothesis::H1)}}}};
        j["kl_bits"] = {{"f1||f0", d10},           {"f0||f1", d01},           {"f1^1||f0^1", dm[0][0]},
                        {"f0^1||f1^1", dm[0][1]}, {"f1^2||f0^2", dm[1][0]}, {"f0^2||f1^2", dm[1][1]}};
        j["independence_defect"] = m.independence_defect();
        out << j.dump(2) << '\n';
        return kOk;
    }
    out << "model: " << o.model << " (hash " << hex64(model_hash(spec)) << ")\n";
    out << "alphabets: |S1| = " << m.s1_size() << ", |S2| = " << m.s2_size() << '\n';
    out << "prior: p0 = " << format_number(m.prior().p0) << ", p1 = " << format_number(m.prior().p1) << '\n';
    out << "f^1_0: " << join(m.marginal(Observer::One, Hypothesis::H0)) << '\n';
    out << "f^1_1: " << join(m.marginal(Observer::One, Hypothesis::H1)) << '\n';
    out << "f^2_0: " << join(m.marginal(Observer::Two, Hypothesis::H0)) << '\n';
    out << "f^2_1: " << join(m.marginal(Observer::Two, Hypothesis::H1)) << '\n';
    out << "D_KL(f1||f0) = " << fixed(d10, 4) << '\n';
    out << "D_KL(f0||f1) = " << fixed(d01, 4) << '\n';
    out << "D_KL(f^1_1||f^1_0) = " << fixed(dm[0][0], 4) << '\n';
    out << "D_KL(f^1_0||f^1_1) = " << fixed(dm[0][1], 4) << '\n';
    out << "D_KL(f^2_1||f^2_0) = " << fixed(dm[1][0], 4) << '\n';
    out << "D_KL(f^2_0||f^2_1) = " << fixed(dm[1][1], 4) << '\n';
    out << "independence defect: " << format_number(m.independence_defect()) << '\n';
    return kOk;
}

struct ExponentOpts {
    std::string model;
    std::optional<double> t;
    std::optional<double> t1;
    std::optional<double> t2;
    std::string out;
};

int cmd_exponents(const ExponentOpts& o, std::ostream& out)
{
    const JointModel m = validate_model(read_model_file(o.model));
    if (o.t1.has_value() != o.t2.has_value()) throw ConfigError("--T1 and --T2 must be given together");
    std::vector<ExponentResult> rows;
    ConfigDigest digest;
    digest.add("command", "exponents");
    if (!o.t && !o.t1) {
        digest.add("mode", "optimal");
        rows.push_back(optimal_centralized_rate(m));
        rows.push_back(optimal_decentralized_rate(m));
    }
    if (o.t) {
        digest.add("T", *o.t);
        rows.push_back(centralized_rate(m, *o.t));
    }
    if (o.t1) {
        digest.add("T1", *o.t1).add("T2", *o.t2);
        rows.push_back(decentralized_rate(m, *o.t1, *o.t2));
    }
    CsvMetadata meta = base_meta("exponents", m.spec(), digest);
    for (const auto& r : rows) {
        if (r.scheme == RateScheme::Decentralized && r.rate > 0.0) {
            meta.set("error_bound", format_number(error_bound(r.rate)));
            break;
        }
    }
    Sink sink(o.out, out);
    write_exponents_csv(sink.stream(), meta, rows);
    return kOk;
}

struct AggbuildOpts {
    std::string model;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    double t1 = 1.0;
    double t2 = 1.0;
    bool sweep = false;
    std::size_t horizon = 7;
    std::uint64_t strings = 1'000'000;
};

int cmd_aggbuild(const AggbuildOpts& o, std::ostream& out)
{
    const JointModelSpec spec = read_model_file(o.model);
    const JointModel m = validate_model(spec);
    std::vector<std::pair<double, double>> pairs =
        o.sweep ? standard_threshold_sweep() : std::vector<std::pair<double, double>>{{o.t1, o.t2}};
    fs::create_directories(o.out_dir);
    ArtifactBuild build;
    build.horizon = o.horizon;
    build.strings = o.strings;
    build.seed = *o.seed;
    build.workers = default_workers();
    const auto arts = build_artifacts(m, pairs, build);
    json manifest;
    manifest["format"] = "dualobs-artifacts";
    manifest["version"] = 1;
    manifest["model_hash"] = hex64(model_hash(m.spec()));
    manifest["horizon"] = o.horizon;
    manifest["strings"] = o.strings;
    manifest["seed"] = *o.seed;
    manifest["pairs"] = json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string prefix = o.sweep ? pair_prefix(i) : std::string();
        const fs::path dir(o.out_dir);
        write_text((dir / (prefix + "agg1.json")).string(), arts[i].agg1->to_json());
        write_text((dir / (prefix + "agg2.json")).string(), arts[i].agg2->to_json());
        write_text((dir / (prefix + "law1.json")).string(), arts[i].law1->to_json());
        write_text((dir / (prefix + "law2.json")).string(), arts[i].law2->to_json());
        manifest["pairs"].push_back({{"T1", pairs[i].first}, {"T2", pairs[i].second}, {"prefix", prefix}});
        out << "wrote " << prefix << "{agg1,agg2,law1,law2}.json for T1=" << format_number(pairs[i].first)
            << " T2=" << format_number(pairs[i].second) << " (" << arts[i].agg1->node_count() << " / "
            << arts[i].agg2->node_count() << " nodes)\n";
    }
    write_text((fs::path(o.out_dir) / "artifacts.json").string(), manifest.dump(2) + "\n");
    return kOk;
}

struct SimulateOpts {
    std::string model;
    std::optional<std::uint64_t> seed;
    std::string kind = "error-vs-n";
    std::string out;
    // error-vs-n
    std::size_t n_max = 20;
    std::optional<double> tc;
    // point
    std::string scheme = "basic";
    double t1 = 1.0;
    double t2 = 1.0;
    double t3 = 0.5;
    double t4 = 0.5;
    std::size_t max_rounds = 200;
    std::optional<std::uint64_t> trials;
    std::string agg1, agg2, law1, law2;
    bool exact_laws = false;
    std::size_t law_horizon = 7;
    double sprt_alpha = 0.05;
    double sprt_beta = 0.05;
    std::size_t sprt_cap = 1000;
    std::string trace_out;
    std::size_t trace_trials = 10;
};

int cmd_simulate(const SimulateOpts& o, std::ostream& out)
{
    const JointModel m = validate_model(read_model_file(o.model));
    const std::size_t workers = default_workers();
    ConfigDigest digest;
    digest.add("command", "simulate").add("kind", o.kind).add_u("seed", *o.seed);

    if (o.kind == "error-vs-n") {
        ErrorVsNSpec spec;
        for (std::size_t n = 1; n <= o.n_max; ++n) spec.n_list.push_back(n);
        spec.trials = o.trials.value_or(100'000);
        spec.central_threshold = o.tc;
        spec.t1 = o.t1;
        spec.t2 = o.t2;
        spec.seed = *o.seed;
        spec.workers = workers;
        digest.add_u("n_max", o.n_max).add_u("trials", spec.trials).add("T1", o.t1).add("T2", o.t2);
        if (o.tc) digest.add("Tc", *o.tc);
        const auto rows = error_vs_n(m, spec);
        CsvMetadata meta = base_meta("simulate", m.spec(), digest);
        meta.set("kind", "error_vs_n");
        meta.set("seed", std::to_string(*o.seed));
        meta.set("trials", std::to_string(spec.trials));
        meta.set("central_threshold", format_number(spec.central_threshold.value_or(m.costs().center.threshold())));
        Sink sink(o.out, out);
        write_results_csv(sink.stream(), meta, rows);
        return kOk;
    }
    if (o.kind != "point") throw ConfigError("--kind must be error-vs-n or point");

    const std::uint64_t trials = o.trials.value_or(10'000);
    digest.add("scheme", o.scheme).add_u("trials", trials);
    ResultRow row;
    PairArtifacts art;
    ConsensusConfig cfg;
    if (o.scheme == "sprt") {
        digest.add("alpha", o.sprt_alpha).add("beta", o.sprt_beta).add_u("cap", o.sprt_cap);
        row = run_sprt_point(m, SprtPolicy::from_error_targets(o.sprt_alpha, o.sprt_beta), o.sprt_cap, trials,
                             *o.seed, 0, workers);
    } else {
        cfg.t1 = o.t1;
        cfg.t2 = o.t2;
        cfg.t3 = o.t3;
        cfg.t4 = o.t4;
        cfg.max_rounds = o.max_rounds;
        digest.add("T1", o.t1).add("T2", o.t2).add_u("max_rounds", o.max_rounds);
        if (o.scheme == "basic") {
            cfg.scheme = Scheme::Basic;
        } else if (o.scheme == "aggregated") {
            cfg.scheme = Scheme::Aggregated;
            digest.add("T3", o.t3).add("T4", o.t4);
            art.agg1 = std::make_shared<const AggregatedModel>(
                load_artifact<MissingAggModel>(o.agg1, &AggregatedModel::from_json));
            art.agg2 = std::make_shared<const AggregatedModel>(
                load_artifact<MissingAggModel>(o.agg2, &AggregatedModel::from_json));
            digest.add("agg1", hex64(fnv1a64(art.agg1->to_json()))).add("agg2", hex64(fnv1a64(art.agg2->to_json())));
        } else if (o.scheme == "accuracy_exchange") {
            cfg.scheme = Scheme::AccuracyExchange;
            digest.add("T3", o.t3).add("T4", o.t4);
            if (o.exact_laws) {
                art.law1 = std::make_shared<const DecisionSequenceDistribution>(
                    exact_decision_law(m, Observer::One, o.t1, o.law_horizon));
                art.law2 = std::make_shared<const DecisionSequenceDistribution>(
                    exact_decision_law(m, Observer::Two, o.t2, o.law_horizon));
                digest.add_u("law_horizon", o.law_horizon);
            } else {
                art.law1 = std::make_shared<const DecisionSequenceDistribution>(
                    load_artifact<MissingDecisionLaw>(o.law1, &DecisionSequenceDistribution::from_json));
                art.law2 = std::make_shared<const DecisionSequenceDistribution>(
                    load_artifact<MissingDecisionLaw>(o.law2, &DecisionSequenceDistribution::from_json));
                digest.add("law1", hex64(fnv1a64(art.law1->to_json())))
                    .add("law2", hex64(fnv1a64(art.law2->to_json())));
            }
        } else {
            throw ConfigError("--scheme must be basic, aggregated, accuracy_exchange or sprt");
        }
        row = run_consensus_point(m, cfg, art, trials, *o.seed, 0, workers);
    }

    CsvMetadata meta = base_meta("simulate", m.spec(), digest);
    meta.set("kind", "point");
    meta.set("seed", std::to_string(*o.seed));
    meta.set("trials", std::to_string(trials));
    {
        Sink sink(o.out, out);
        write_results_csv(sink.stream(), meta, std::span(&row, 1));
    }
    if (!o.trace_out.empty()) {
        if (o.scheme == "sprt") throw ConfigError("traces are recorded for consensus schemes only");
        std::vector<ConsensusTrace> traces;
        cfg.record_rounds = true;
        for (std::size_t i = 0; i < o.trace_trials && i < trials; ++i) {
            traces.push_back(consensus_trial(m, cfg, art, *o.seed, 0, i));
        }
        Sink sink(o.trace_out, out);
        write_traces_csv(sink.stream(), meta, traces);
    }
    return kOk;
}

struct SweepOpts {
    std::string model;
    std::optional<std::uint64_t> seed;
    std::string artifacts;
    std::size_t horizon = 7;
    std::uint64_t strings = 1'000'000;
    std::uint64_t trials = 10'000;
    std::size_t max_rounds = 200;
    std::string schemes = "sprt,basic,aggregated,accuracy_exchange";
    std::string alpha_grid = "0.2,0.3,0.4,0.5,0.6,0.7,0.8";
    std::string out;
};

int cmd_sweep(const SweepOpts& o, std::ostream& out)
{
    const JointModel m = validate_model(read_model_file(o.model));
    StoppingTimeSpec spec;
    spec.sprt = spec.basic = spec.aggregated = spec.accuracy_exchange = false;
    std::stringstream ss(o.schemes);
    std::string s;
    while (std::getline(ss, s, ',')) {
        if (s == "sprt") {
            spec.sprt = true;
        } else if (s == "basic") {
            spec.basic = true;
        } else if (s == "aggregated") {
            spec.aggregated = true;
        } else if (s == "accuracy_exchange") {
            spec.accuracy_exchange = true;
        } else if (!s.empty()) {
            throw ConfigError("unknown scheme '" + s + "'");
        }
    }
    spec.alpha_thresholds = parse_list(o.alpha_grid);
    spec.trials = o.trials;
    spec.max_rounds = o.max_rounds;
    spec.seed = *o.seed;
    spec.workers = default_workers();

    ConfigDigest digest;
    digest.add("command", "sweep").add_u("seed", *o.seed).add("schemes", o.schemes).add("alpha_grid", o.alpha_grid);
    digest.add_u("trials", o.trials).add_u("max_rounds", o.max_rounds);

    std::vector<PairArtifacts> arts;
    if (spec.aggregated || spec.accuracy_exchange) {
        if (!o.artifacts.empty()) {
            const fs::path dir(o.artifacts);
            arts.resize(spec.threshold_pairs.size());
            for (std::size_t i = 0; i < arts.size(); ++i) {
                const std::string prefix = pair_prefix(i);
                if (spec.aggregated) {
                    arts[i].agg1 = std::make_shared<const AggregatedModel>(load_artifact<MissingAggModel>(
                        (dir / (prefix + "agg1.json")).string(), &AggregatedModel::from_json));
                    arts[i].agg2 = std::make_shared<const AggregatedModel>(load_artifact<MissingAggModel>(
                        (dir / (prefix + "agg2.json")).string(), &AggregatedModel::from_json));
                    const auto [t1, t2] = spec.threshold_pairs[i];
                    if (std::abs(arts[i].agg1->t1() - t1) > 1e-12 || std::abs(arts[i].agg1->t2() - t2) > 1e-12) {
                        throw ConfigError("artifact " + prefix + "agg1.json was built for other thresholds");
                    }
                }
                if (spec.accuracy_exchange) {
                    arts[i].law1 = std::make_shared<const DecisionSequenceDistribution>(
                        load_artifact<MissingDecisionLaw>((dir / (prefix + "law1.json")).string(),
                                                          &DecisionSequenceDistribution::from_json));
                    arts[i].law2 = std::make_shared<const DecisionSequenceDistribution>(
                        load_artifact<MissingDecisionLaw>((dir / (prefix + "law2.json")).string(),
                                                          &DecisionSequenceDistribution::from_json));
                }
            }
            const std::string manifest = read_text((dir / "artifacts.json").string());
            digest.add("artifacts", hex64(fnv1a64(manifest)));
        } else {
            ArtifactBuild build;
            build.horizon = o.horizon;
            build.strings = o.strings;
            build.aggregated = spec.aggregated;
            build.decision_laws = spec.accuracy_exchange;
            build.seed = *o.seed;
            build.workers = spec.workers;
            arts = build_artifacts(m, spec.threshold_pairs, build);
            digest.add_u("horizon", o.horizon).add_u("strings", o.strings);
        }
    }
    const auto rows = error_vs_stopping_time(m, spec, arts);
    CsvMetadata meta = base_meta("sweep", m.spec(), digest);
    meta.set("kind", "error_vs_stopping_time");
    meta.set("seed", std::to_string(*o.seed));
    meta.set("trials_per_point", std::to_string(o.trials));
    if (o.artifacts.empty()) {
        meta.set("artifact_horizon", std::to_string(o.horizon));
        meta.set("artifact_strings", std::to_string(o.strings));
    } else {
        meta.set("artifacts", o.artifacts);
    }
    Sink sink(o.out, out);
    write_results_csv(sink.stream(), meta, rows);
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two-observer binary hypothesis testing: detection, consensus, error exponents"};
    app.name("dualobs");
    app.require_subcommand(1);

    ValidateOpts vo;
    auto* validate = app.add_subcommand("validate", "check a model file; print marginals and KL divergences");
    validate->add_option("model", vo.model, "model file")->required();
    validate->add_flag("--json", vo.json, "print the model as JSON with marginals and KL values");

    ExponentOpts eo;
    auto* exponents = app.add_subcommand("exponents", "error exponents at given or optimal thresholds (CSV)");
    exponents->add_option("model", eo.model, "model file")->required();
    exponents->add_option("--T", eo.t, "centralized likelihood-ratio threshold");
    exponents->add_option("--T1", eo.t1, "observer 1 likelihood-ratio threshold");
    exponents->add_option("--T2", eo.t2, "observer 2 likelihood-ratio threshold");
    exponents->add_option("--out", eo.out, "output CSV (default stdout)");

    AggbuildOpts ao;
    auto* aggbuild = app.add_subcommand("aggbuild", "build aggregated models and exact decision laws");
    aggbuild->add_option("model", ao.model, "model file")->required();
    aggbuild->add_option("--seed", ao.seed, "root seed")->required();
    aggbuild->add_option("--out-dir", ao.out_dir, "artifact directory")->required();
    aggbuild->add_option("--T1", ao.t1, "observer 1 threshold");
    aggbuild->add_option("--T2", ao.t2, "observer 2 threshold");
    aggbuild->add_flag("--sweep", ao.sweep, "build every pair of the standard threshold sweep");
    aggbuild->add_option("--horizon", ao.horizon, "prefix horizon")->check(CLI::Range(1, 8));
    aggbuild->add_option("--strings", ao.strings, "simulated strings per pair");

    SimulateOpts so;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo error vs n, or one operating point");
    simulate->add_option("model", so.model, "model file")->required();
    simulate->add_option("--seed", so.seed, "root seed")->required();
    simulate->add_option("--kind", so.kind, "error-vs-n | point")->check(CLI::IsMember({"error-vs-n", "point"}));
    simulate->add_option("--out", so.out, "output CSV (default stdout)");
    simulate->add_option("--n-max", so.n_max, "largest n (error-vs-n)")->check(CLI::PositiveNumber);
    simulate->add_option("--Tc", so.tc, "centralized likelihood-ratio threshold (error-vs-n)");
    simulate->add_option("--trials", so.trials, "trial budget")->check(CLI::PositiveNumber);
    simulate->add_option("--scheme", so.scheme, "basic | aggregated | accuracy_exchange | sprt (point)");
    simulate->add_option("--T1", so.t1, "observer 1 threshold");
    simulate->add_option("--T2", so.t2, "observer 2 threshold");
    simulate->add_option("--T3", so.t3, "observer 1 alpha threshold");
    simulate->add_option("--T4", so.t4, "observer 2 alpha threshold");
    simulate->add_option("--max-rounds", so.max_rounds, "round cap");
    simulate->add_option("--agg1", so.agg1, "aggregated model of observer 1");
    simulate->add_option("--agg2", so.agg2, "aggregated model of observer 2");
    simulate->add_option("--law1", so.law1, "decision law of observer 1");
    simulate->add_option("--law2", so.law2, "decision law of observer 2");
    simulate->add_flag("--exact-laws", so.exact_laws, "compute decision laws in-process");
    simulate->add_option("--law-horizon", so.law_horizon, "horizon for --exact-laws");
    simulate->add_option("--sprt-alpha", so.sprt_alpha, "SPRT false-alarm target");
    simulate->add_option("--sprt-beta", so.sprt_beta, "SPRT miss target");
    simulate->add_option("--sprt-cap", so.sprt_cap, "SPRT sample cap");
    simulate->add_option("--trace-out", so.trace_out, "write per-round traces of the first trials");
    simulate->add_option("--trace-trials", so.trace_trials, "number of traced trials");

    SweepOpts wo;
    auto* sweep = app.add_subcommand("sweep", "error vs expected stopping time over the standard threshold sweep");
    sweep->add_option("model", wo.model, "model file")->required();
    sweep->add_option("--seed", wo.seed, "root seed")->required();
    sweep->add_option("--artifacts", wo.artifacts, "directory written by aggbuild --sweep");
    sweep->add_option("--horizon", wo.horizon, "artifact horizon when building in-process")->check(CLI::Range(1, 8));
    sweep->add_option("--strings", wo.strings, "aggregated-model strings when building in-process");
    sweep->add_option("--trials", wo.trials, "trials per operating point")->check(CLI::PositiveNumber);
    sweep->add_option("--max-rounds", wo.max_rounds, "round cap");
    sweep->add_option("--schemes", wo.schemes, "comma-separated subset of sprt,basic,aggregated,accuracy_exchange");
    sweep->add_option("--alpha-grid", wo.alpha_grid, "comma-separated T3 = T4 values");
    sweep->add_option("--out", wo.out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) return cmd_validate(vo, out);
        if (*exponents) return cmd_exponents(eo, out);
        if (*aggbuild) return cmd_aggbuild(ao, out);
        if (*simulate) return cmd_simulate(so, out);
        if (*sweep) return cmd_sweep(wo, out);
    } catch (const ValidationError& e) {
        err << "dualobs: invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const InfeasibleError& e) {
        err << "dualobs: infeasible thresholds: " << e.what() << '\n';
        return kInfeasible;
    } catch (const MissingArtifact& e) {
        err << "dualobs: missing artifact: " << e.what() << '\n';
        return kMissingArtifact;
    } catch (const std::exception& e) {
        err << "dualobs: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"dualobs"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dualobs::cli
