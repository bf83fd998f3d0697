#include <doctest.h>

#include <cmath>

#include "delnet/channel.hpp"
#include "delnet/decision.hpp"
#include "delnet/errors.hpp"
#include "support.hpp"

using namespace delnet;

namespace {

InformationState bsc(double flip)
{
    const Space y("Y", {"0", "1"});
    return InformationState::from_experiment(
        Distribution::uniform(y), Kernel(y, Space("H", {"0", "1"}), Matrix::from_rows({{1 - flip, flip}, {flip, 1 - flip}})));
}

InformationState constant_state(std::size_t n, const std::vector<double>& post)
{
    return InformationState("H", Space("H", {"h"}), Space::indexed("Y", n), {1.0}, Matrix::from_rows({post}));
}

} // namespace

TEST_CASE("bayes_risk examples")
{
    const auto y4 = Space::indexed("Y", 4);
    Rng rng(3);
    const auto prior = testing::random_distribution(rng, y4);
    const auto perfect = InformationState::from_experiment(prior, Kernel::identity(y4));
    CHECK(bayes_risk(perfect, LossMatrix::zero_one(y4)).value == doctest::Approx(0.0));

    const auto blind = InformationState::uninformed(Distribution::uniform(y4));
    CHECK(bayes_risk(blind, LossMatrix::zero_one(y4)).value == doctest::Approx(0.75).epsilon(1e-15));

    const auto s = bsc(0.2);
    const auto loss = LossMatrix::zero_one(s.labels());
    const auto r = bayes_risk(s, loss);
    CHECK(r.value == doctest::Approx(testing::rule_enumeration_risk(s, loss)).epsilon(1e-15));
    CHECK(r.value == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(r.policy == std::vector<std::size_t>{0, 1});
}

TEST_CASE("bayes_risk breaks ties toward the lowest action")
{
    const auto s = constant_state(2, {0.5, 0.5});
    const auto loss = LossMatrix::zero_one(s.labels());
    const auto r = bayes_risk(s, loss);
    CHECK(r.policy == std::vector<std::size_t>{0});
    // either act attains the same value
    for (std::size_t a = 0; a < 2; ++a)
        CHECK(posterior_losses(s.posterior(0), loss)[a] == doctest::Approx(r.value));
}

TEST_CASE("bayes_risk rejects mismatched labels")
{
    const auto s = bsc(0.1);
    CHECK_THROWS_AS(bayes_risk(s, LossMatrix::zero_one(Space::indexed("Y", 3))), InputError);
}

TEST_CASE("scoring_value examples")
{
    const auto point = constant_state(3, {0.0, 1.0, 0.0});
    CHECK(scoring_value(point, ScoringRule::Log) == 0.0);
    const auto half = constant_state(2, {0.5, 0.5});
    CHECK(scoring_value(half, ScoringRule::Log) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    // (1/2 - 1)^2 + (1/2)^2
    CHECK(scoring_value(half, ScoringRule::Brier) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("score under the log rule is infinite off the report's support")
{
    const double q[] = {1.0, 0.0};
    CHECK(score(ScoringRule::Log, q, 1) == kInfinity);
    CHECK(score(ScoringRule::Brier, q, 1) == doctest::Approx(2.0));
}

TEST_CASE("divergence examples")
{
    const double p[] = {1.0, 0.0};
    const double u[] = {0.5, 0.5};
    const double flip[] = {0.0, 1.0};
    CHECK(divergence(ScoringRule::Log, p, p) == 0.0);
    CHECK(divergence(ScoringRule::Brier, u, u) == 0.0);
    CHECK(divergence(ScoringRule::Log, p, u) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(divergence(ScoringRule::Brier, p, flip) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(divergence(ScoringRule::Log, p, flip) == kInfinity);
    CHECK(divergence(ScoringRule::Log, u, p) == kInfinity);
}

TEST_CASE("conditional mutual information examples")
{
    const auto s = bsc(0.0);  // H = Y, Y uniform binary
    SUBCASE("copy")
    {
        const auto p = testing::yhm_table(s, Kernel::identity(s.alphabet()));
        CHECK(std::abs(conditional_mutual_information(p, 2, 2, 2)) <= 1e-15);
    }
    SUBCASE("constant M gives I(Y;H)")
    {
        const auto p = testing::yhm_table(s, Kernel::constant(s.alphabet(), Distribution::uniform(Space("M", {"m"}))));
        CHECK(conditional_mutual_information(p, 2, 2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    }
    SUBCASE("M = H through a flip-0.25 channel, exhaustive over the 8 cells")
    {
        const Kernel flip(s.alphabet(), Space("M", {"0", "1"}), Matrix::from_rows({{0.75, 0.25}, {0.25, 0.75}}));
        const auto p = testing::yhm_table(s, flip);
        // I(Y;H|M) = H(Y|M) - H(Y|H,M) = h(0.25) - 0 with H = Y
        const double h = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
        CHECK(conditional_mutual_information(p, 2, 2, 2) == doctest::Approx(h).epsilon(1e-14));
        CHECK(testing::cmi_by_entropies(p, 2, 2, 2) == doctest::Approx(h).epsilon(1e-14));
    }
}

TEST_CASE("information states from a joint table keep zero-weight symbols")
{
    const Space y("Y", {"0", "1"});
    const Space b("B", {"0", "1", "2"});
    const JointModel m("Y", Distribution(y, {0.3, 0.7}),
                       {{"B", {"Y"}, Kernel(y, b, Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}))}});
    const std::string obs[] = {"B"};
    const auto s = InformationState::from_joint(full_joint(m), "Y", obs);
    REQUIRE(s.size() == 3);
    CHECK(s.weight(2) == 0.0);
    CHECK(s.posterior(2)[0] == doctest::Approx(0.3));
    CHECK(s.posterior(2)[1] == doctest::Approx(0.7));
}

TEST_CASE("property: garbling never lowers Bayes risk")
{
    Rng rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        const auto s = testing::random_state(rng, rng.between(2, 4), rng.between(1, 5), true);
        const auto g = testing::random_kernel(rng, s.alphabet(), testing::space("M", rng.between(1, 5)), true);
        const auto m = apply_encoder(s, g);
        for (int l = 0; l < 3; ++l) {
            const auto loss = testing::random_loss(rng, s.labels(), rng.between(1, 4));
            CHECK(bayes_risk(m, loss).value >= bayes_risk(s, loss).value - 1e-9);
        }
    }
}

TEST_CASE("property: bayes_risk equals the best of all deterministic rules")
{
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = testing::random_state(rng, rng.between(1, 4), rng.between(1, 4), true);
        const auto loss = testing::random_loss(rng, s.labels(), rng.between(1, 4));
        CHECK(std::abs(bayes_risk(s, loss).value - testing::rule_enumeration_risk(s, loss)) <= 1e-12);
    }
}

TEST_CASE("property: pi_M is the P(H | M)-weighted mixture of pi_H")
{
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = testing::random_state(rng, rng.between(2, 4), rng.between(1, 5), true);
        const auto g = testing::random_kernel(rng, s.alphabet(), testing::space("M", rng.between(1, 4)), true);
        const auto m = apply_encoder(s, g);
        for (std::size_t k = 0; k < m.size(); ++k) {
            double pm = 0.0;
            for (std::size_t h = 0; h < s.size(); ++h)
                pm += s.weight(h) * g(h, k);
            CHECK(std::abs(pm - m.weight(k)) <= 1e-12);
            if (pm == 0.0)
                continue;
            for (std::size_t y = 0; y < s.labels().size(); ++y) {
                double mix = 0.0;
                for (std::size_t h = 0; h < s.size(); ++h)
                    mix += s.weight(h) * g(h, k) / pm * s.posterior(h)[y];
                CHECK(std::abs(mix - m.posterior(k)[y]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("property: divergences are nonnegative and vanish only at p = q")
{
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = rng.between(1, 6);
        const auto p = rng.simplex(n);
        auto q = rng.simplex(n);
        for (auto rule : {ScoringRule::Log, ScoringRule::Brier}) {
            CHECK(divergence(rule, p, q) >= 0.0);
            CHECK(divergence(rule, p, p) <= 1e-15);
            if (divergence(rule, p, q) == 0.0)
                for (std::size_t i = 0; i < n; ++i)
                    CHECK(std::abs(p[i] - q[i]) <= 1e-9);
        }
    }
}

TEST_CASE("property: the library CMI matches the entropy decomposition")
{
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = testing::random_state(rng, rng.between(1, 4), rng.between(1, 5), true);
        const auto g = testing::random_kernel(rng, s.alphabet(), testing::space("M", rng.between(1, 4)), true);
        const auto p = testing::yhm_table(s, g);
        const double lib = conditional_mutual_information(p, s.labels().size(), s.size(), g.to().size());
        CHECK(lib >= -1e-12);
        CHECK(std::abs(lib - testing::cmi_by_entropies(p, s.labels().size(), s.size(), g.to().size())) <= 1e-9);
    }
}
