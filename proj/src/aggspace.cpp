#include "dualobs/aggspace.hpp"

#include "dualobs/detect.hpp"
#include "dualobs/error.hpp"
#include "dualobs/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dualobs {

using nlohmann::json;

namespace {

constexpr std::size_t kExactAggregatedHorizonCap = 8;
constexpr std::uint64_t kStringsPerChunk = 1u << 14;

DecisionCode encode_prefix(std::span<const std::uint8_t> prefix)
{
    DecisionCode code = 0;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (prefix[i] > 1) throw DomainError("decision bits must be 0 or 1");
        code |= static_cast<DecisionCode>(prefix[i]) << i;
    }
    return code;
}

// Mixed-radix encoding of count vectors over an alphabet of size k with
// per-symbol counts <= horizon.
struct TypeCodec {
    std::size_t k;
    std::uint64_t base;
    std::vector<std::uint64_t> unit;

    TypeCodec(std::size_t alphabet, std::size_t horizon) : k(alphabet), base(horizon + 1), unit(alphabet)
    {
        std::uint64_t p = 1;
        for (std::size_t a = 0; a < k; ++a) {
            unit[a] = p;
            if (a + 1 < k && p > std::numeric_limits<std::uint64_t>::max() / base) {
                throw HorizonTooLarge("type encoding overflows for this alphabet and horizon");
            }
            p *= base;
        }
    }

    double dot(std::uint64_t key, std::span<const double> weights) const
    {
        double acc = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            acc += static_cast<double>(key % base) * weights[a];
            key /= base;
        }
        return acc;
    }
};

std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t limit)
{
    std::uint64_t p = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (p > limit / base) throw HorizonTooLarge("prefix encoding overflows for this alphabet and horizon");
        p *= base;
    }
    return p;
}

json probs_to_json(const std::vector<std::vector<double>>& per_n)
{
    json out = json::array();
    for (const auto& row : per_n) out.push_back(row);
    return out;
}

const char* kind_name(AggregatedModel::Kind k)
{
    switch (k) {
    case AggregatedModel::Kind::Frequentist: return "frequentist";
    case AggregatedModel::Kind::Exact: return "exact";
    case AggregatedModel::Kind::Independent: return "independent";
    }
    return "frequentist";
}

AggregatedModel::Kind kind_from(const std::string& s)
{
    if (s == "frequentist") return AggregatedModel::Kind::Frequentist;
    if (s == "exact") return AggregatedModel::Kind::Exact;
    if (s == "independent") return AggregatedModel::Kind::Independent;
    throw ParseError("unknown aggregated model kind '" + s + "'");
}

Observer observer_from(int v)
{
    if (v == 1) return Observer::One;
    if (v == 2) return Observer::Two;
    throw ParseError("observer must be 1 or 2");
}

}  // namespace

// ---------------------------------------------------------------------------
// DecisionSequenceDistribution

DecisionSequenceDistribution::DecisionSequenceDistribution(Observer observer, std::size_t horizon,
                                                           double lr_threshold,
                                                           std::array<std::vector<std::vector<double>>, 2> probs)
    : observer_(observer), horizon_(horizon), lr_threshold_(lr_threshold), probs_(std::move(probs))
{
    for (const auto& per_n : probs_) {
        if (per_n.size() != horizon_ + 1) throw DomainError("decision law needs one table per prefix length");
        for (std::size_t n = 0; n <= horizon_; ++n) {
            if (per_n[n].size() != (std::size_t{1} << n)) throw DomainError("decision law table has wrong size");
        }
    }
}

DecisionSequenceDistribution DecisionSequenceDistribution::uninformative(Observer observer, std::size_t horizon)
{
    if (horizon > 24) throw HorizonTooLarge("uninformative decision law horizon too large");
    std::array<std::vector<std::vector<double>>, 2> probs;
    for (auto& per_n : probs) {
        for (std::size_t n = 0; n <= horizon; ++n) {
            per_n.emplace_back(std::size_t{1} << n, std::ldexp(1.0, -static_cast<int>(n)));
        }
    }
    return DecisionSequenceDistribution(observer, horizon, 1.0, std::move(probs));
}

double DecisionSequenceDistribution::probability(Hypothesis h, std::size_t n, DecisionCode code) const
{
    if (n > horizon_) throw DomainError("decision prefix longer than the law's horizon");
    if (code >= (DecisionCode{1} << n)) throw DomainError("decision code out of range");
    return probs_[to_int(h)][n][code];
}

double DecisionSequenceDistribution::probability(Hypothesis h, std::span<const std::uint8_t> prefix) const
{
    return probability(h, prefix.size(), encode_prefix(prefix));
}

std::string DecisionSequenceDistribution::to_json() const
{
    json j;
    j["format"] = "dualobs-decision-law";
    j["version"] = 1;
    j["observer"] = static_cast<int>(observer_);
    j["horizon"] = horizon_;
    j["lr_threshold"] = lr_threshold_;
    j["p_h0"] = probs_to_json(probs_[0]);
    j["p_h1"] = probs_to_json(probs_[1]);
    return j.dump();
}

DecisionSequenceDistribution DecisionSequenceDistribution::from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("decision law: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "dualobs-decision-law") throw ParseError("not a decision law");
        if (j.at("version").get<int>() != 1) throw ParseError("unsupported decision law version");
        std::array<std::vector<std::vector<double>>, 2> probs;
        probs[0] = j.at("p_h0").get<std::vector<std::vector<double>>>();
        probs[1] = j.at("p_h1").get<std::vector<std::vector<double>>>();
        return DecisionSequenceDistribution(observer_from(j.at("observer").get<int>()),
                                            j.at("horizon").get<std::size_t>(), j.at("lr_threshold").get<double>(),
                                            std::move(probs));
    } catch (const json::exception& e) {
        throw ParseError(std::string("decision law: ") + e.what());
    } catch (const DomainError& e) {
        throw ParseError(std::string("decision law: ") + e.what());
    }
}

DecisionSequenceDistribution exact_decision_law(const JointModel& model, Observer observer, double lr_threshold,
                                                std::size_t horizon, std::size_t horizon_cap)
{
    if (horizon > horizon_cap) {
        throw HorizonTooLarge("decision law horizon " + std::to_string(horizon) + " exceeds cap " +
                              std::to_string(horizon_cap));
    }
    if (horizon > 30) throw HorizonTooLarge("decision law horizon too large to index");
    const double log2_t = ThresholdPolicy(lr_threshold).log2_threshold();
    const std::size_t k = model.alphabet_size(observer);
    const auto llr = model.marginal_llr(observer);
    const std::array<std::span<const double>, 2> f = {model.marginal(observer, Hypothesis::H0),
                                                      model.marginal(observer, Hypothesis::H1)};
    const TypeCodec codec(k, horizon);

    std::array<std::vector<std::vector<double>>, 2> probs;
    for (auto& per_n : probs) {
        per_n.resize(horizon + 1);
        per_n[0] = {1.0};
    }

    using Key = std::pair<DecisionCode, std::uint64_t>;
    std::map<Key, std::array<double, 2>> states{{Key{0, 0}, {1.0, 1.0}}};
    for (std::size_t n = 1; n <= horizon; ++n) {
        std::map<Key, std::array<double, 2>> next;
        for (const auto& [key, mass] : states) {
            for (std::size_t a = 0; a < k; ++a) {
                const std::uint64_t type = key.second + codec.unit[a];
                const bool d = decide_log2(codec.dot(type, llr), log2_t);
                const DecisionCode code = key.first | (static_cast<DecisionCode>(d) << (n - 1));
                auto& slot = next[Key{code, type}];
                slot[0] += mass[0] * f[0][a];
                slot[1] += mass[1] * f[1][a];
            }
        }
        for (auto& per_n : probs) per_n[n].assign(std::size_t{1} << n, 0.0);
        for (const auto& [key, mass] : next) {
            probs[0][n][key.first] += mass[0];
            probs[1][n][key.first] += mass[1];
        }
        states = std::move(next);
    }
    return DecisionSequenceDistribution(observer, horizon, lr_threshold, std::move(probs));
}

// ---------------------------------------------------------------------------
// beta

namespace {

std::array<double, 2> next_decision_conditionals(const DecisionSequenceDistribution& dsd,
                                                 std::span<const std::uint8_t> prefix)
{
    if (prefix.empty()) throw DomainError("beta needs a nonempty decision prefix");
    std::array<double, 2> c{};
    for (int h = 0; h < 2; ++h) {
        const Hypothesis hh = static_cast<Hypothesis>(h);
        const double whole = dsd.probability(hh, prefix);
        const double head = dsd.probability(hh, prefix.first(prefix.size() - 1));
        c[h] = head > 0.0 ? whole / head : 0.0;
    }
    return c;
}

}  // namespace

BetaValue beta(const DecisionSequenceDistribution& dsd, std::span<const std::uint8_t> prefix)
{
    const auto c = next_decision_conditionals(dsd, prefix);
    if (!(c[0] > 0.0) || !(c[1] > 0.0)) {
        throw BetaUndefined("decision prefix has zero probability under at least one hypothesis");
    }
    return {c[0] / c[1], prefix.size()};
}

BetaValue beta_clamped(const DecisionSequenceDistribution& dsd, std::span<const std::uint8_t> prefix)
{
    const auto c = next_decision_conditionals(dsd, prefix);
    if (!(c[0] > 0.0) && !(c[1] > 0.0)) {
        throw BetaUndefined("decision prefix has zero probability under both hypotheses");
    }
    double b = kBetaCeiling;
    if (!(c[0] > 0.0)) {
        b = kBetaFloor;
    } else if (c[1] > 0.0) {
        b = std::clamp(c[0] / c[1], kBetaFloor, kBetaCeiling);
    }
    return {b, prefix.size()};
}

// ---------------------------------------------------------------------------
// AggregatedModel

AggregatedModel::AggregatedModel(Observer observer, std::size_t horizon, std::size_t obs_alphabet, double t1,
                                 double t2, std::uint64_t sample_count, Kind kind)
    : observer_(observer),
      horizon_(horizon),
      obs_alphabet_(obs_alphabet),
      t1_(t1),
      t2_(t2),
      sample_count_(sample_count),
      kind_(kind)
{
    if (horizon > 255) throw HorizonTooLarge("aggregated model horizon too large");
    parent_.push_back(static_cast<std::int32_t>(kNone));
    depth_.push_back(0);
    symbol_.push_back(0);
    children_.assign(symbol_count(), static_cast<std::int32_t>(kNone));
    mass_.assign(2, 0.0);
}

std::int64_t AggregatedModel::add_node(std::int64_t parent, std::size_t symbol)
{
    const auto id = static_cast<std::int64_t>(parent_.size());
    if (id > std::numeric_limits<std::int32_t>::max()) throw BudgetExceeded("aggregated model has too many nodes");
    parent_.push_back(static_cast<std::int32_t>(parent));
    depth_.push_back(static_cast<std::uint8_t>(depth_[static_cast<std::size_t>(parent)] + 1));
    symbol_.push_back(static_cast<std::uint16_t>(symbol));
    children_.resize(children_.size() + symbol_count(), static_cast<std::int32_t>(kNone));
    mass_.resize(mass_.size() + 2, 0.0);
    children_[static_cast<std::size_t>(parent) * symbol_count() + symbol] = static_cast<std::int32_t>(id);
    return id;
}

std::int64_t AggregatedModel::child(std::int64_t node, std::size_t obs, int decision) const
{
    if (node < 0 || static_cast<std::size_t>(node) >= node_count()) return kNone;
    if (obs >= obs_alphabet_ || decision < 0 || decision > 1) throw DomainError("aggregated symbol out of range");
    return children_[static_cast<std::size_t>(node) * symbol_count() + obs * 2 + static_cast<std::size_t>(decision)];
}

double AggregatedModel::conditional(std::int64_t node, std::size_t obs, int decision, Hypothesis h) const
{
    if (node < 0) return 0.0;
    const double m = mass(node, h);
    if (!(m > 0.0)) return 0.0;
    const std::int64_t c = child(node, obs, decision);
    if (c == kNone) return 0.0;
    return mass(c, h) / m;
}

double AggregatedModel::decision_prefix_probability(Hypothesis h, std::span<const std::uint8_t> prefix) const
{
    if (prefix.size() > horizon_) throw DomainError("decision prefix longer than the aggregated horizon");
    const double root = mass(kRoot, h);
    if (!(root > 0.0)) throw BetaUndefined("aggregated model has no mass under this hypothesis");
    std::vector<std::int64_t> frontier{kRoot};
    for (const std::uint8_t d : prefix) {
        std::vector<std::int64_t> next;
        for (const std::int64_t node : frontier) {
            for (std::size_t s = 0; s < obs_alphabet_; ++s) {
                const std::int64_t c = child(node, s, d);
                if (c != kNone) next.push_back(c);
            }
        }
        frontier = std::move(next);
    }
    double total = 0.0;
    for (const std::int64_t node : frontier) total += mass(node, h);
    return total / root;
}

std::string AggregatedModel::to_json() const
{
    json j;
    j["format"] = "dualobs-aggregated";
    j["version"] = 1;
    j["observer"] = static_cast<int>(observer_);
    j["horizon"] = horizon_;
    j["obs_alphabet"] = obs_alphabet_;
    j["t1"] = t1_;
    j["t2"] = t2_;
    j["sample_count"] = sample_count_;
    j["kind"] = kind_name(kind_);
    j["root"] = {mass_[0], mass_[1]};
    json nodes = json::array();
    for (std::size_t i = 1; i < node_count(); ++i) {
        nodes.push_back({parent_[i], symbol_[i], mass_[2 * i], mass_[2 * i + 1]});
    }
    j["nodes"] = std::move(nodes);
    return j.dump();
}

AggregatedModel AggregatedModel::from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("aggregated model: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "dualobs-aggregated") throw ParseError("not an aggregated model");
        if (j.at("version").get<int>() != 1) throw ParseError("unsupported aggregated model version");
        AggregatedModel m(observer_from(j.at("observer").get<int>()), j.at("horizon").get<std::size_t>(),
                          j.at("obs_alphabet").get<std::size_t>(), j.at("t1").get<double>(),
                          j.at("t2").get<double>(), j.at("sample_count").get<std::uint64_t>(),
                          kind_from(j.at("kind").get<std::string>()));
        const auto root = j.at("root").get<std::vector<double>>();
        if (root.size() != 2) throw ParseError("aggregated model root needs two masses");
        m.mass_[0] = root[0];
        m.mass_[1] = root[1];
        for (const auto& row : j.at("nodes")) {
            const auto parent = row.at(0).get<std::int64_t>();
            const auto symbol = row.at(1).get<std::size_t>();
            if (parent < 0 || static_cast<std::size_t>(parent) >= m.node_count() || symbol >= m.symbol_count()) {
                throw ParseError("aggregated model node references an unknown parent or symbol");
            }
            if (m.depth(parent) >= m.horizon_) throw ParseError("aggregated model node exceeds the horizon");
            const std::int64_t id = m.add_node(parent, symbol);
            m.mass_[2 * static_cast<std::size_t>(id)] = row.at(2).get<double>();
            m.mass_[2 * static_cast<std::size_t>(id) + 1] = row.at(3).get<double>();
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("aggregated model: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Builders

namespace {

// Inserts sorted (prefix-key, h) records into `m` in lexicographic order, so
// nodes come out in depth-first preorder.
template <typename AddNode, typename AddMass>
void insert_sorted_strings(const std::vector<std::uint64_t>& records, std::size_t horizon, std::uint64_t symbols,
                           AddNode&& add_node, AddMass&& add_mass)
{
    std::vector<std::int64_t> path(horizon + 1, AggregatedModel::kRoot);
    std::vector<std::size_t> prev(horizon, 0);
    bool first = true;
    std::vector<std::size_t> sym(horizon);
    for (const std::uint64_t rec : records) {
        const int h = static_cast<int>(rec & 1u);
        std::uint64_t key = rec >> 1;
        for (std::size_t i = horizon; i-- > 0;) {
            sym[i] = static_cast<std::size_t>(key % symbols);
            key /= symbols;
        }
        std::size_t common = 0;
        if (!first) {
            while (common < horizon && sym[common] == prev[common]) ++common;
        }
        for (std::size_t i = common; i < horizon; ++i) path[i + 1] = add_node(path[i], sym[i]);
        for (std::size_t i = 0; i <= horizon; ++i) add_mass(path[i], h);
        prev = sym;
        first = false;
    }
}

}  // namespace

std::pair<AggregatedModel, AggregatedModel> build_aggregated_model(const JointModel& model, double t1, double t2,
                                                                   std::size_t horizon, std::uint64_t num_strings,
                                                                   std::uint64_t seed, std::size_t workers)
{
    if (horizon < 1) throw DomainError("aggregated model horizon must be at least 1");
    const double log2_t1 = ThresholdPolicy(t1).log2_threshold();
    const double log2_t2 = ThresholdPolicy(t2).log2_threshold();
    const std::uint64_t a1 = model.s1_size() * 2;
    const std::uint64_t a2 = model.s2_size() * 2;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 2;
    checked_power(a1, horizon, limit);
    checked_power(a2, horizon, limit);

    const JointSampler sampler(model);
    const auto llr1 = model.marginal_llr(Observer::One);
    const auto llr2 = model.marginal_llr(Observer::Two);
    const double p1 = model.prior().p1;

    const std::uint64_t chunks = (num_strings + kStringsPerChunk - 1) / kStringsPerChunk;
    std::vector<std::vector<std::uint64_t>> rec1(chunks);
    std::vector<std::vector<std::uint64_t>> rec2(chunks);
    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c, 0xa66ULL));
        const std::uint64_t begin = c * kStringsPerChunk;
        const std::uint64_t end = std::min(num_strings, begin + kStringsPerChunk);
        auto& out1 = rec1[c];
        auto& out2 = rec2[c];
        out1.reserve(end - begin);
        out2.reserve(end - begin);
        for (std::uint64_t s = begin; s < end; ++s) {
            const Hypothesis h = hypothesis_from(rng.bernoulli(p1));
            double l1 = 0.0;
            double l2 = 0.0;
            std::uint64_t k1 = 0;
            std::uint64_t k2 = 0;
            for (std::size_t i = 0; i < horizon; ++i) {
                const ObservationPair obs = sampler.draw(h, rng);
                l1 += llr1[obs.y];
                l2 += llr2[obs.z];
                const std::uint64_t d1 = decide_log2(l1, log2_t1) ? 1 : 0;
                const std::uint64_t d2 = decide_log2(l2, log2_t2) ? 1 : 0;
                k1 = k1 * a1 + obs.y * 2 + d2;
                k2 = k2 * a2 + obs.z * 2 + d1;
            }
            out1.push_back(k1 << 1 | static_cast<std::uint64_t>(to_int(h)));
            out2.push_back(k2 << 1 | static_cast<std::uint64_t>(to_int(h)));
        }
    });

    auto assemble = [&](std::vector<std::vector<std::uint64_t>>& parts, Observer o, std::uint64_t symbols) {
        std::vector<std::uint64_t> all;
        all.reserve(num_strings);
        for (auto& p : parts) {
            all.insert(all.end(), p.begin(), p.end());
            std::vector<std::uint64_t>().swap(p);
        }
        std::sort(all.begin(), all.end());
        AggregatedModel m(o, horizon, model.alphabet_size(o), t1, t2, num_strings, AggregatedModel::Kind::Frequentist);
        insert_sorted_strings(
            all, horizon, symbols, [&](std::int64_t parent, std::size_t sym) { return m.add_node(parent, sym); },
            [&](std::int64_t node, int h) { m.mass_[static_cast<std::size_t>(node) * 2 + static_cast<std::size_t>(h)] += 1.0; });
        return m;
    };
    AggregatedModel m1 = assemble(rec1, Observer::One, a1);
    AggregatedModel m2 = assemble(rec2, Observer::Two, a2);
    return {std::move(m1), std::move(m2)};
}

AggregatedModel exact_aggregated_model(const JointModel& model, Observer observer, double t1, double t2,
                                       std::size_t horizon)
{
    if (horizon < 1) throw DomainError("aggregated model horizon must be at least 1");
    if (horizon > kExactAggregatedHorizonCap) {
        throw HorizonTooLarge("exact aggregated model horizon " + std::to_string(horizon) + " exceeds cap " +
                              std::to_string(kExactAggregatedHorizonCap));
    }
    const Observer alt = alternate(observer);
    const double log2_t_alt = ThresholdPolicy(alt == Observer::One ? t1 : t2).log2_threshold();
    if (!(t1 > 0.0) || !(t2 > 0.0)) throw DomainError("likelihood-ratio thresholds must be positive");
    const std::size_t k_own = model.alphabet_size(observer);
    const std::size_t k_alt = model.alphabet_size(alt);
    const auto llr_alt = model.marginal_llr(alt);
    const TypeCodec codec(k_alt, horizon);
    const Prior prior = model.prior();

    AggregatedModel m(observer, horizon, k_own, t1, t2, 0, AggregatedModel::Kind::Exact);
    m.mass_[0] = prior.p0;
    m.mass_[1] = prior.p1;

    using States = std::map<std::uint64_t, std::array<double, 2>>;
    auto cell = [&](std::size_t own, std::size_t other) {
        return observer == Observer::One ? model.index(own, other) : model.index(other, own);
    };
    const std::array<std::span<const double>, 2> f = {model.joint(Hypothesis::H0), model.joint(Hypothesis::H1)};

    auto recurse = [&](auto&& self, std::int64_t node, const States& states) -> void {
        if (m.depth(node) >= horizon) return;
        for (std::size_t s = 0; s < k_own; ++s) {
            for (int d = 0; d < 2; ++d) {
                States next;
                for (const auto& [type, mass] : states) {
                    for (std::size_t a = 0; a < k_alt; ++a) {
                        const std::uint64_t t = type + codec.unit[a];
                        if (static_cast<int>(decide_log2(codec.dot(t, llr_alt), log2_t_alt)) != d) continue;
                        auto& slot = next[t];
                        slot[0] += mass[0] * f[0][cell(s, a)];
                        slot[1] += mass[1] * f[1][cell(s, a)];
                    }
                }
                std::array<double, 2> total{};
                for (const auto& [t, mass] : next) {
                    total[0] += mass[0];
                    total[1] += mass[1];
                }
                if (!(total[0] > 0.0) && !(total[1] > 0.0)) continue;
                const std::int64_t c = m.add_node(node, s * 2 + static_cast<std::size_t>(d));
                m.mass_[static_cast<std::size_t>(c) * 2] = total[0];
                m.mass_[static_cast<std::size_t>(c) * 2 + 1] = total[1];
                self(self, c, next);
            }
        }
    };
    recurse(recurse, AggregatedModel::kRoot, States{{0, {prior.p0, prior.p1}}});
    return m;
}

AggregatedModel independent_aggregated_model(const JointModel& model, Observer observer,
                                             const DecisionSequenceDistribution& alternate_law, std::size_t horizon)
{
    if (horizon < 1) throw DomainError("aggregated model horizon must be at least 1");
    if (horizon > alternate_law.horizon()) throw DomainError("alternate decision law horizon is too short");
    if (horizon > kExactAggregatedHorizonCap) throw HorizonTooLarge("independent aggregated model horizon too large");
    const std::size_t k = model.alphabet_size(observer);
    const std::array<std::span<const double>, 2> f = {model.marginal(observer, Hypothesis::H0),
                                                      model.marginal(observer, Hypothesis::H1)};
    const Prior prior = model.prior();
    const double t_alt = alternate_law.lr_threshold();
    AggregatedModel m(observer, horizon, k, observer == Observer::Two ? t_alt : 1.0,
                      observer == Observer::One ? t_alt : 1.0, 0, AggregatedModel::Kind::Independent);
    m.mass_[0] = prior.p0;
    m.mass_[1] = prior.p1;

    // own[h] = p_h * prod f_h(obs) along the current path
    auto recurse = [&](auto&& self, std::int64_t node, std::array<double, 2> own, DecisionCode code) -> void {
        const std::size_t n = m.depth(node);
        if (n >= horizon) return;
        for (std::size_t s = 0; s < k; ++s) {
            for (int d = 0; d < 2; ++d) {
                const DecisionCode next_code = code | (static_cast<DecisionCode>(d) << n);
                const std::array<double, 2> next_own = {own[0] * f[0][s], own[1] * f[1][s]};
                const double m0 = next_own[0] * alternate_law.probability(Hypothesis::H0, n + 1, next_code);
                const double m1 = next_own[1] * alternate_law.probability(Hypothesis::H1, n + 1, next_code);
                if (!(m0 > 0.0) && !(m1 > 0.0)) continue;
                const std::int64_t c = m.add_node(node, s * 2 + static_cast<std::size_t>(d));
                m.mass_[static_cast<std::size_t>(c) * 2] = m0;
                m.mass_[static_cast<std::size_t>(c) * 2 + 1] = m1;
                self(self, c, next_own, next_code);
            }
        }
    };
    recurse(recurse, AggregatedModel::kRoot, {prior.p0, prior.p1}, 0);
    return m;
}

// ---------------------------------------------------------------------------
// alpha

AlphaState AlphaState::initial(Prior prior) { return AlphaState(std::log(prior.p1 / prior.p0), 0, AggregatedModel::kRoot); }

AlphaState AlphaState::from_alpha(double alpha, std::size_t n, std::int64_t cursor)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    return AlphaState(std::log(alpha) - std::log1p(-alpha), n, cursor);
}

double AlphaState::alpha() const
{
    if (log_odds_ >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds_));
    const double e = std::exp(log_odds_);
    return e / (1.0 + e);
}

bool AlphaState::at_least(double t) const
{
    if (!(t > 0.0 && t < 1.0)) throw DomainError("alpha threshold must lie in (0, 1)");
    return log_odds_ >= std::log(t) - std::log1p(-t) - kTieTolerance;
}

AlphaState alpha_update_general(const AlphaState& state, std::size_t obs, int received_decision,
                                const AggregatedModel& agg)
{
    const std::int64_t node = state.cursor();
    if (node == AggregatedModel::kNone || static_cast<std::size_t>(node) >= agg.node_count()) {
        throw UnseenHistory("history is not tracked by the aggregated model");
    }
    if (agg.depth(node) >= agg.horizon()) throw HorizonTooLarge("history reached the aggregated model's horizon");
    if (!(agg.mass(node, Hypothesis::H0) > 0.0) && !(agg.mass(node, Hypothesis::H1) > 0.0)) {
        throw UnseenHistory("history has no mass in the aggregated model");
    }
    const std::int64_t next = agg.child(node, obs, received_decision);
    if (next == AggregatedModel::kNone) throw UnseenHistory("history extension absent from the aggregated model");
    const double l0 = agg.conditional(node, obs, received_decision, Hypothesis::H0);
    const double l1 = agg.conditional(node, obs, received_decision, Hypothesis::H1);
    if (!(l0 > 0.0) && !(l1 > 0.0)) throw UnseenHistory("history extension has no mass under either hypothesis");
    // r = l0 / l1, pinned to the beta clamp when one side vanishes
    double r = kBetaCeiling;
    if (!(l0 > 0.0)) {
        r = kBetaFloor;
    } else if (l1 > 0.0) {
        r = l0 / l1;
    }
    return state.advanced(-std::log(r), next);
}

AlphaState alpha_update_independent(const AlphaState& state, std::size_t obs, BetaValue beta,
                                    const JointModel& model, Observer observer)
{
    if (!(beta.beta > 0.0) || !std::isfinite(beta.beta)) throw DomainError("beta must be positive and finite");
    const auto llr = model.marginal_llr(observer);
    if (obs >= llr.size()) throw DomainError("observation index out of range");
    return state.advanced(llr[obs] * std::log(2.0) - std::log(beta.beta), AggregatedModel::kNone);
}

}  // namespace dualobs
