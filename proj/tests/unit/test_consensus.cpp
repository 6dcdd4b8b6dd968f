#include "fixtures.hpp"

#include "dualobs/aggspace.hpp"
#include "dualobs/consensus.hpp"
#include "dualobs/detect.hpp"
#include "dualobs/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace dualobs;

namespace {

ConsensusConfig config_for(Scheme s, std::size_t max_rounds = 200)
{
    ConsensusConfig c;
    c.scheme = s;
    c.max_rounds = max_rounds;
    return c;
}

void check_trace_shape(const ConsensusTrace& t)
{
    CHECK(t.rounds.size() == t.rounds_run);
    for (std::size_t i = 0; i < t.rounds.size(); ++i) {
        const auto& r = t.rounds[i];
        CHECK(r.round == i + 1);
        const bool stop_here = r.d1 == r.d2 || (r.o1 && r.o2 && *r.o1 == *r.o2);
        if (i + 1 < t.rounds.size()) {
            CHECK_FALSE(stop_here);
            CHECK_FALSE(r.stopped);
        }
    }
    if (t.stopping_time) {
        const auto& last = t.rounds.back();
        CHECK(last.stopped);
        CHECK(*t.stopping_time == t.rounds_run);
        const int decision = last.d1 == last.d2 ? last.d1 : *last.o1;
        CHECK(t.final_decision == hypothesis_from(decision == 1));
    } else {
        CHECK_FALSE(t.final_decision.has_value());
    }
    std::uint64_t bits = 0;
    for (const auto& msg : t.messages) {
        if (msg.kind != MessageKind::Accuracy) ++bits;
    }
    CHECK(bits == t.bits_exchanged);
}

}  // namespace

TEST_CASE("config invariants")
{
    auto c = config_for(Scheme::Basic, 0);
    CHECK_THROWS_AS(check_config(c), ConfigError);
    c.max_rounds = 10;
    c.t1 = 0.0;
    CHECK_THROWS_AS(check_config(c), ConfigError);
    c.t1 = 1.0;
    c.scheme = Scheme::Aggregated;
    c.t3 = 1.0;
    CHECK_THROWS_AS(check_config(c), ConfigError);
    c.t3 = 0.5;
    CHECK_NOTHROW(check_config(c));
    const auto m = fixtures::table1();
    Rng rng(1);
    CHECK_THROWS_AS(run_basic(m, config_for(Scheme::Basic, 0), rng), ConfigError);
}

TEST_CASE("identical observers agree in round 1 exactly when their LLRs share a side")
{
    // f^1 = f^2 as marginals, same thresholds
    JointModelSpec spec = fixtures::product_spec({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.5, 0.3, 0.2}, {0.5, 0.3, 0.2});
    const auto m = validate_model(spec);
    const auto llr = m.marginal_llr(Observer::One);
    auto c = config_for(Scheme::Basic, 1);
    bool seen[3][3] = {};
    for (std::uint64_t s = 0; s < 400; ++s) {
        Rng rng(s);
        const auto t = run_basic(m, c, rng);
        const auto& r = t.rounds.at(0);
        seen[r.obs.y][r.obs.z] = true;
        const bool same_side = (llr[r.obs.y] >= 0.0) == (llr[r.obs.z] >= 0.0);
        CHECK(t.stopping_time.has_value() == same_side);
        CHECK(t.did_not_stop() == !same_side);
    }
    for (auto& row : seen) {
        for (bool b : row) CHECK(b);
    }
}

TEST_CASE("basic scheme on Table 1 terminates, errs about 19% of the time and exchanges two bits per round")
{
    const auto m = fixtures::table1();
    const auto c = config_for(Scheme::Basic);
    int correct = 0;
    int stopped = 0;
    for (std::uint64_t i = 0; i < 10'000; ++i) {
        Rng rng(derive_seed(123, 0, i));
        const auto t = run_basic(m, c, rng);
        if (i < 200) check_trace_shape(t);
        CHECK(t.bits_exchanged == 2 * t.rounds_run);
        CHECK(t.reals_exchanged == 0);
        if (t.stopping_time) ++stopped;
        if (t.correct()) ++correct;
    }
    CHECK(stopped >= 9990);
    CHECK(correct >= 7800);
    CHECK(correct <= 8300);
}

TEST_CASE("replay determinism")
{
    const auto m = fixtures::table1();
    const auto agg = build_aggregated_model(m, 1.0, 1.0, 7, 20'000, 3, 1);
    const auto l1 = exact_decision_law(m, Observer::One, 1.0, 7);
    const auto l2 = exact_decision_law(m, Observer::Two, 1.0, 7);
    const AggregatedPair ap{&agg.first, &agg.second};
    const DecisionLawPair lp{&l1, &l2};
    for (Scheme s : {Scheme::Basic, Scheme::Aggregated, Scheme::AccuracyExchange}) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Rng a(seed);
            Rng b(seed);
            const auto ta = run_consensus(m, config_for(s), ap, lp, Hypothesis::H1, a);
            const auto tb = run_consensus(m, config_for(s), ap, lp, Hypothesis::H1, b);
            CHECK(ta == tb);
            check_trace_shape(ta);
        }
    }
}

TEST_CASE("aggregated scheme with uninformative decision streams follows the basic stop pattern")
{
    const auto m = fixtures::table1();
    const auto u1 = DecisionSequenceDistribution::uninformative(Observer::One, 8);
    const auto u2 = DecisionSequenceDistribution::uninformative(Observer::Two, 8);
    const auto agg1 = independent_aggregated_model(m, Observer::One, u2, 8);
    const auto agg2 = independent_aggregated_model(m, Observer::Two, u1, 8);
    auto c = config_for(Scheme::Aggregated, 50);
    // posterior threshold p1 is the likelihood-ratio threshold 1 = T1 = T2
    c.t3 = m.prior().p1;
    c.t4 = m.prior().p1;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng a(seed);
        Rng b(seed);
        const auto basic = run_basic(m, config_for(Scheme::Basic, 50), Hypothesis::H0, a);
        const auto agg = run_aggregated(m, {&agg1, &agg2}, c, Hypothesis::H0, b);
        CHECK(basic.stopping_time == agg.stopping_time);
        CHECK(basic.final_decision == agg.final_decision);
        for (const auto& r : agg.rounds) {
            if (!r.o1) continue;
            CHECK(*r.o1 == r.d1);
            CHECK(*r.o2 == r.d2);
        }
    }
}

TEST_CASE("round cap of 1 with a persisting disagreement does not stop")
{
    const auto m = fixtures::table1();
    const auto agg = build_aggregated_model(m, 1.0, 1.0, 3, 20'000, 3, 1);
    auto c = config_for(Scheme::Aggregated, 1);
    c.t3 = 0.8;
    c.t4 = 0.8;
    int found = 0;
    for (std::uint64_t seed = 0; seed < 2000 && found < 5; ++seed) {
        Rng rng(seed);
        const auto t = run_aggregated(m, {&agg.first, &agg.second}, c, rng);
        const auto& r = t.rounds.at(0);
        if (r.d1 != r.d2 && r.o1 != r.o2) {
            ++found;
            CHECK(t.did_not_stop());
            CHECK_FALSE(t.final_decision.has_value());
            CHECK(t.bits_exchanged == 4);
        }
    }
    CHECK(found == 5);
}

TEST_CASE("accuracy exchange matches the aggregated scheme on a product model")
{
    const auto m = fixtures::table1();
    const auto agg1 = exact_aggregated_model(m, Observer::One, 1.0, 1.0, 4);
    const auto agg2 = exact_aggregated_model(m, Observer::Two, 1.0, 1.0, 4);
    const auto l1 = exact_decision_law(m, Observer::One, 1.0, 4);
    const auto l2 = exact_decision_law(m, Observer::Two, 1.0, 4);
    auto ca = config_for(Scheme::Aggregated, 4);
    auto ce = config_for(Scheme::AccuracyExchange, 4);
    ca.t3 = ce.t3 = 0.7;
    ca.t4 = ce.t4 = 0.7;
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        Rng a(seed);
        Rng b(seed);
        const auto ta = run_aggregated(m, {&agg1, &agg2}, ca, a);
        const auto te = run_accuracy_exchange(m, {&l1, &l2}, ce, b);
        REQUIRE(ta.rounds.size() == te.rounds.size());
        for (std::size_t i = 0; i < ta.rounds.size(); ++i) {
            const auto& ra = ta.rounds[i];
            const auto& re = te.rounds[i];
            CHECK(ra.alpha1.has_value() == re.alpha1.has_value());
            if (!ra.alpha1) continue;
            CHECK(std::abs(*ra.alpha1 - *re.alpha1) <= 1e-6);
            CHECK(std::abs(*ra.alpha2 - *re.alpha2) <= 1e-6);
            ++compared;
        }
        CHECK(ta.stopping_time == te.stopping_time);
    }
    CHECK(compared > 500);
}

TEST_CASE("accuracy exchange with beta = 1 thresholds the local posteriors")
{
    const auto m = fixtures::table1();
    const auto u1 = DecisionSequenceDistribution::uninformative(Observer::One, 10);
    const auto u2 = DecisionSequenceDistribution::uninformative(Observer::Two, 10);
    auto c = config_for(Scheme::AccuracyExchange, 20);
    c.t3 = 0.65;
    c.t4 = 0.4;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed);
        const auto t = run_accuracy_exchange(m, {&u1, &u2}, c, rng);
        DetectorState s1{0.0, 0, Scope::Observer1};
        DetectorState s2{0.0, 0, Scope::Observer2};
        for (const auto& r : t.rounds) {
            s1 = local_update(s1, r.obs.y, m);
            s2 = local_update(s2, r.obs.z, m);
            if (!r.o1) continue;
            CHECK(*r.beta1 == doctest::Approx(1.0));
            CHECK(*r.o1 == (posterior(s1, m.prior()) >= c.t3 ? 1 : 0));
            CHECK(*r.o2 == (posterior(s2, m.prior()) >= c.t4 ? 1 : 0));
        }
    }
}

TEST_CASE("accuracy exchange accounting")
{
    const auto m = fixtures::table1();
    const auto l1 = exact_decision_law(m, Observer::One, 2.0, 7);
    const auto l2 = exact_decision_law(m, Observer::Two, 0.5, 7);
    auto c = config_for(Scheme::AccuracyExchange);
    c.t1 = 2.0;
    c.t2 = 0.5;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Rng rng(seed);
        const auto t = run_accuracy_exchange(m, {&l1, &l2}, c, rng);
        std::uint64_t bits = 0;
        std::uint64_t reals = 0;
        for (const auto& r : t.rounds) {
            const bool disagree = r.d1 != r.d2;
            bits += disagree ? 4 : 2;
            reals += disagree ? 2 : 0;
            CHECK(r.beta1.has_value() == disagree);
        }
        CHECK(t.bits_exchanged == bits);
        CHECK(t.reals_exchanged == reals);
        check_trace_shape(t);
    }
}

TEST_CASE("schemes without their artifacts fail")
{
    const auto m = fixtures::table1();
    Rng rng(1);
    CHECK_THROWS_AS(run_aggregated(m, {}, config_for(Scheme::Aggregated), rng), MissingAggModel);
    CHECK_THROWS_AS(run_accuracy_exchange(m, {}, config_for(Scheme::AccuracyExchange), rng), MissingDecisionLaw);
    CHECK_THROWS_AS(run_consensus(m, config_for(Scheme::Aggregated), {}, {}, Hypothesis::H0, rng), MissingArtifact);
    const auto l1 = exact_decision_law(m, Observer::One, 1.0, 3);
    CHECK_THROWS_AS(run_accuracy_exchange(m, {&l1, &l1}, config_for(Scheme::AccuracyExchange), rng), ConfigError);
}

TEST_CASE("unseen histories abort the trial")
{
    const auto m = fixtures::table2();
    // tiny training set: most long histories are absent
    const auto agg = build_aggregated_model(m, 3.0, 1.0 / 3.0, 7, 20, 5, 1);
    int aborted = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed);
        const auto t = run_aggregated(m, {&agg.first, &agg.second}, config_for(Scheme::Aggregated), rng);
        if (t.aborted) {
            ++aborted;
            CHECK_FALSE(t.stopping_time.has_value());
            CHECK_FALSE(t.did_not_stop());
            CHECK_FALSE(t.abort_reason.empty());
        }
    }
    CHECK(aborted > 0);
}
