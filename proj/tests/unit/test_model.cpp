#include "fixtures.hpp"

#include "dualobs/error.hpp"
#include "dualobs/model.hpp"
#include "dualobs/model_io.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dualobs;

namespace {

double linf(std::span<const double> a, std::span<const double> b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

JointModelSpec two_by_two(Pmf f0, Pmf f1)
{
    JointModelSpec s;
    s.s1_size = 2;
    s.s2_size = 2;
    s.f0 = std::move(f0);
    s.f1 = std::move(f1);
    s.p0 = 0.5;
    return s;
}

}  // namespace

TEST_CASE("Table 1 validates with prior (0.4, 0.6)")
{
    const auto m = fixtures::table1();
    CHECK(m.s1_size() == 3);
    CHECK(m.s2_size() == 4);
    CHECK(m.prior().p0 == doctest::Approx(0.4));
    CHECK(m.prior().p1 == doctest::Approx(0.6));
}

TEST_CASE("validation rejects broken models")
{
    const Pmf u{0.25, 0.25, 0.25, 0.25};
    CHECK_THROWS_AS(validate_model(two_by_two(u, u)), DegenerateError);
    CHECK_THROWS_AS(validate_model(two_by_two({0.0, 0.5, 0.25, 0.25}, u)), SupportError);
    CHECK_THROWS_AS(validate_model(two_by_two({-0.1, 0.6, 0.25, 0.25}, u)), SupportError);
    CHECK_THROWS_AS(validate_model(two_by_two({0.3, 0.3, 0.3, 0.3}, u)), NormalizationError);
    auto bad_prior = two_by_two({0.1, 0.2, 0.3, 0.4}, u);
    bad_prior.p0 = 1.0;
    CHECK_THROWS_AS(validate_model(bad_prior), PriorError);
    bad_prior.p0 = 0.0;
    CHECK_THROWS_AS(validate_model(bad_prior), PriorError);
    auto wrong_size = two_by_two({0.5, 0.5}, u);
    CHECK_THROWS_AS(validate_model(wrong_size), ValidationError);
}

TEST_CASE("input PMFs within 1e-9 of unit mass are renormalized")
{
    const auto m = validate_model(two_by_two({0.1, 0.2, 0.3, 0.4 + 5e-10}, {0.25, 0.25, 0.25, 0.25}));
    double s = 0.0;
    for (double v : m.joint(Hypothesis::H0)) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-12);
    CHECK_THROWS_AS(validate_model(two_by_two({0.1, 0.2, 0.3, 0.4 + 1e-7}, {0.25, 0.25, 0.25, 0.25})),
                    NormalizationError);
}

TEST_CASE("Table 1 marginals are the row and column sums")
{
    const auto m = fixtures::table1();
    const Pmf f1_obs1{0.45, 0.25, 0.30};
    const Pmf f0_obs2{0.10, 0.25, 0.35, 0.30};
    CHECK(linf(marginal(m, Observer::One, Hypothesis::H1), f1_obs1) < 1e-12);
    CHECK(linf(marginal(m, Observer::Two, Hypothesis::H0), f0_obs2) < 1e-12);
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
        for (Observer o : {Observer::One, Observer::Two}) {
            double s = 0.0;
            for (double v : m.marginal(o, h)) s += v;
            CHECK(std::abs(s - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("product models have their factors as marginals")
{
    std::mt19937_64 gen(17);
    for (int i = 0; i < 10; ++i) {
        const auto g0 = fixtures::random_pmf(gen, 3);
        const auto g1 = fixtures::random_pmf(gen, 3);
        const auto k0 = fixtures::random_pmf(gen, 2);
        const auto k1 = fixtures::random_pmf(gen, 2);
        const auto m = validate_model(fixtures::product_spec(g0, k0, g1, k1));
        CHECK(linf(m.marginal(Observer::One, Hypothesis::H0), g0) < 1e-12);
        CHECK(linf(m.marginal(Observer::Two, Hypothesis::H1), k1) < 1e-12);
        CHECK(m.is_product());
    }
}

TEST_CASE("Table 1 factors into its marginals cell by cell")
{
    const auto m = fixtures::table1();
    CHECK(m.independence_defect() <= 1e-12);
    CHECK_FALSE(fixtures::table2().is_product(1e-3));
}

TEST_CASE("KL anchors for the two tables")
{
    const auto t1 = fixtures::table1();
    CHECK(std::abs(kl_divergence(t1.joint(Hypothesis::H1), t1.joint(Hypothesis::H0)) - 0.7986) < 5e-4);
    CHECK(std::abs(kl_divergence(t1.joint(Hypothesis::H0), t1.joint(Hypothesis::H1)) - 0.7057) < 5e-4);
    const auto t2 = fixtures::table2();
    CHECK(std::abs(kl_divergence(t2.joint(Hypothesis::H1), t2.joint(Hypothesis::H0)) - 0.0627) < 5e-4);
    CHECK(std::abs(kl_divergence(t2.joint(Hypothesis::H0), t2.joint(Hypothesis::H1)) - 0.0649) < 5e-4);
    CHECK(std::abs(kl_divergence(t2.marginal(Observer::One, Hypothesis::H1), t2.marginal(Observer::One, Hypothesis::H0)) -
                   0.0290) < 5e-4);
    CHECK(std::abs(kl_divergence(t2.marginal(Observer::Two, Hypothesis::H0), t2.marginal(Observer::Two, Hypothesis::H1)) -
                   0.0244) < 5e-4);
}

TEST_CASE("KL divergence is nonnegative and vanishes only on equal PMFs")
{
    std::mt19937_64 gen(3);
    for (int i = 0; i < 200; ++i) {
        const auto p = fixtures::random_pmf(gen, 6, 0.001);
        const auto q = fixtures::random_pmf(gen, 6, 0.001);
        CHECK(kl_divergence(p, q) > 0.0);
        CHECK(kl_divergence(p, p) == 0.0);
    }
    const Pmf p{0.5, 0.5, 0.0};
    const Pmf q{0.25, 0.25, 0.5};
    CHECK(kl_divergence(p, q) == doctest::Approx(1.0));
    CHECK_THROWS_AS(kl_divergence(q, p), SupportError);
}

TEST_CASE("empirical types count observations")
{
    const std::vector<ObservationPair> one{{0, 0}};
    const auto t = empirical_type(one, 2, 2);
    CHECK(t.pmf() == Pmf{1.0, 0.0, 0.0, 0.0});
    const std::vector<ObservationPair> two{{0, 0}, {0, 1}};
    CHECK(empirical_type(two, 2, 2).pmf() == Pmf{0.5, 0.5, 0.0, 0.0});
    CHECK(empirical_type(two, 2, 2).marginal_y() == Pmf{1.0, 0.0});
    CHECK(empirical_type(two, 2, 2).marginal_z() == Pmf{0.5, 0.5});
    CHECK_THROWS_AS(empirical_type(std::span<const ObservationPair>{}, 2, 2), EmptySequence);
}

TEST_CASE("type of a concatenation is the count-weighted average")
{
    const auto m = fixtures::table1();
    Rng rng(5);
    const auto a = sample(m, Hypothesis::H0, rng, 37);
    const auto b = sample(m, Hypothesis::H1, rng, 91);
    std::vector<ObservationPair> ab(a);
    ab.insert(ab.end(), b.begin(), b.end());
    const auto ta = empirical_type(a, 3, 4);
    const auto tb = empirical_type(b, 3, 4);
    auto sum = ta;
    sum += tb;
    const auto joint = empirical_type(ab, 3, 4);
    CHECK(sum.n() == joint.n());
    const auto pa = ta.pmf();
    const auto pb = tb.pmf();
    const auto pj = joint.pmf();
    for (std::size_t i = 0; i < pj.size(); ++i) {
        CHECK(pj[i] == doctest::Approx((37.0 * pa[i] + 91.0 * pb[i]) / 128.0).epsilon(1e-12));
    }
    CHECK(sum.pmf() == pj);
}

TEST_CASE("sampling is deterministic and matches f_h")
{
    const auto m = fixtures::table1();
    Rng r1(99);
    Rng r2(99);
    CHECK(sample(m, Hypothesis::H1, r1, 5) == sample(m, Hypothesis::H1, r2, 5));
    CHECK(sample(m, Hypothesis::H1, r1, 0).empty());

    Rng big(2024);
    const auto s = sample(m, Hypothesis::H1, big, 1'000'000);
    CHECK(linf(empirical_type(s, 3, 4).pmf(), m.joint(Hypothesis::H1)) < 0.005);

    Rng mid(7);
    const auto s0 = sample(m, Hypothesis::H0, mid, 1000);
    CHECK(linf(empirical_type(s0, 3, 4).pmf(), m.joint(Hypothesis::H0)) < 0.05);
}

TEST_CASE("model files round-trip through JSON")
{
    const auto spec = fixtures::table2().spec();
    const auto back = parse_model_spec(model_to_json(spec));
    CHECK(back == spec);
    CHECK(model_hash(back) == model_hash(spec));
    CHECK_THROWS_AS(parse_model_spec("{ not json"), ParseError);
    CHECK_THROWS_AS(parse_model_spec(R"({"s1_size": 2})"), ParseError);
    CHECK_THROWS_AS(read_model_file("/nonexistent/model.json"), ParseError);
}

TEST_CASE("seed derivation separates streams")
{
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
    Rng a(derive_seed(11, 0, 0));
    Rng b(derive_seed(11, 0, 0));
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}
