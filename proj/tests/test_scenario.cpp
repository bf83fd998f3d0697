#include <doctest.h>

#include <cmath>

#include "delnet/blackwell.hpp"
#include "delnet/channel.hpp"
#include "delnet/errors.hpp"
#include "delnet/review.hpp"
#include "delnet/scenario.hpp"
#include "support.hpp"

using namespace delnet;

namespace {

ScenarioConfig shipped(const std::string& name) { return load_config(std::string(DELNET_CONFIG_DIR) + "/" + name); }

const char* const kRelay = R"(
scenario: relay-depth
model:
  labels: [a, b, c, d]
relay_depth:
  depths: [1, 2, 3, 5]
  hop: HOP
)";

std::string with_hop(const std::string& hop)
{
    std::string s = kRelay;
    s.replace(s.find("HOP"), 3, hop);
    return s;
}

} // namespace

TEST_CASE("relay depth examples")
{
    SUBCASE("perfect hop")
    {
        const auto t = run_relay_depth(parse_config(with_hop("identity")));
        CHECK(t.number(0, "accuracy") == 1.0);
    }
    SUBCASE("constant hop gives the best prior guess")
    {
        auto c = parse_config(with_hop("{constant: [0.1, 0.2, 0.3, 0.4]}"));
        c.model.prior = {0.1, 0.2, 0.45, 0.25};
        const auto t = run_relay_depth(c);
        for (std::size_t r = 0; r < 4; ++r)
            CHECK(t.number(r, "accuracy") == doctest::Approx(0.45).epsilon(1e-14));
    }
    SUBCASE("0.9-fidelity hops against composed-channel eigenvalues")
    {
        const auto t = run_relay_depth(shipped("relay_depth.yaml"));
        const double lambda = (4 * 0.9 - 1) / 3;
        const int depths[] = {1, 2, 3, 5};
        for (std::size_t r = 0; r < 4; ++r) {
            const double expected = 0.25 + 0.75 * std::pow(lambda, depths[r]);
            CHECK(t.number(r, "accuracy") == doctest::Approx(expected).epsilon(1e-13));
            CHECK(t.number(r, "gap_to_centralized") == doctest::Approx(1 - expected).epsilon(1e-13));
            if (r > 0)
                CHECK(t.number(r, "accuracy") < t.number(r - 1, "accuracy"));
        }
    }
}

TEST_CASE("interface examples")
{
    SUBCASE("shipped config: structured above prose, both nonincreasing")
    {
        const auto c = shipped("interface.yaml");
        const auto t = run_interface(c);
        REQUIRE(t.rows().size() == 4);
        CHECK(t.number(0, "accuracy_structured") == t.number(0, "accuracy_prose"));

        // oracle: prose stage s is B garbled by s symmetric hops; accuracy by rule enumeration
        const auto state = build_state(c);
        auto prose = state;
        for (std::size_t s = 0; s < 4; ++s) {
            if (s > 0)
                prose = apply_encoder(prose, Kernel::symmetric(prose.alphabet(), 0.85));
            CHECK(t.number(s, "accuracy_prose") ==
                  doctest::Approx(1 - testing::rule_enumeration_risk(prose, build_loss(c))).epsilon(1e-12));
            CHECK(t.number(s, "accuracy_structured") >= t.number(s, "accuracy_prose"));
            if (s > 0) {
                CHECK(t.number(s, "accuracy_structured") <= t.number(s - 1, "accuracy_structured") + 1e-12);
                CHECK(t.number(s, "accuracy_prose") < t.number(s - 1, "accuracy_prose"));
            }
        }
        CHECK(t.number(3, "accuracy_structured") > t.number(3, "accuracy_prose"));
    }
    SUBCASE("identity structured relay is flat")
    {
        auto c = shipped("interface.yaml");
        c.interface->structured_optimal = false;
        const auto t = run_interface(c);
        for (std::size_t s = 1; s < t.rows().size(); ++s)
            CHECK(t.number(s, "accuracy_structured") == t.number(0, "accuracy_structured"));
    }
}

TEST_CASE("distortion scatter examples")
{
    SUBCASE("seeded family: positive correlation")
    {
        const auto t = run_distortion_scatter(shipped("distortion_scatter.yaml"));
        CHECK(t.rows().size() == 50);
        const auto& f = t.footer();
        REQUIRE(f.front().first == "pearson_r");
        CHECK(std::stod(f.front().second) > 0.0);
        for (std::size_t r = 0; r < 50; ++r) {
            CHECK(t.number(r, "kl") >= 0.0);
            CHECK(t.number(r, "accuracy_drop") >= -1e-12);
        }
    }
    SUBCASE("lossless relay: all zeros, correlation undefined")
    {
        auto c = shipped("distortion_scatter.yaml");
        c.distortion_scatter->relay = ChannelSpec{};
        const auto t = run_distortion_scatter(c);
        for (std::size_t r = 0; r < t.rows().size(); ++r) {
            CHECK(std::abs(t.number(r, "kl")) <= 1e-15);
            CHECK(std::abs(t.number(r, "accuracy_drop")) <= 1e-15);
        }
        CHECK(t.footer().front().second == "undefined");
    }
    SUBCASE("fewer than three instances: statistics refused")
    {
        auto c = shipped("distortion_scatter.yaml");
        c.distortion_scatter->instances = 2;
        CHECK(run_distortion_scatter(c).footer().front().second == "refused");
    }
    SUBCASE("a seed is required")
    {
        auto c = shipped("distortion_scatter.yaml");
        c.seed.reset();
        CHECK_THROWS_AS(run_distortion_scatter(c), ConfigError);
    }
    SUBCASE("two-point family: untouched versus fully pooled")
    {
        Rng rng(3);
        const auto s = testing::random_state(rng, 3, 3);
        const auto loss = LossMatrix::zero_one(s.labels());
        const auto pooled = Kernel::constant(s.alphabet(), Distribution::uniform(Space("M", {"m"})));
        const double kl_id = communication_tax(s, Kernel::identity(s.alphabet()), ScoringRule::Log).expected_divergence;
        const double kl_pool = communication_tax(s, pooled, ScoringRule::Log).expected_divergence;
        const double drop_id = bayes_risk(apply_encoder(s, Kernel::identity(s.alphabet())), loss).value - bayes_risk(s, loss).value;
        const double drop_pool = bayes_risk(apply_encoder(s, pooled), loss).value - bayes_risk(s, loss).value;
        CHECK(kl_pool > kl_id);
        CHECK(drop_pool >= drop_id);
    }
}

TEST_CASE("signal expansion examples")
{
    const auto t = run_signal_expansion(shipped("signal_expansion.yaml"));
    REQUIRE(t.rows().size() == 3);
    CHECK(std::abs(t.number(0, "gain")) <= 1e-12);
    CHECK(t.number(0, "redundant") == 1.0);
    // fresh 0.8 look: per message block, w in the block is right w.p. 0.8 -> 13/15 overall
    CHECK(t.number(1, "accuracy_with_w") == doctest::Approx(13.0 / 15.0).epsilon(1e-14));
    CHECK(t.number(1, "gain") >= 0.1);
    CHECK(t.number(1, "redundant") == 0.0);
    CHECK(t.number(2, "accuracy_with_w") == doctest::Approx(1.0));
}

TEST_CASE("review frontier scenario")
{
    const auto c = shipped("review_frontier.yaml");
    const auto t = run_review_frontier(c);
    const auto rows = review_frontier(build_state(c), build_loss(c), c.review->grid);
    REQUIRE(t.rows().size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(t.number(i, "value") == rows[i].value);
        CHECK(t.number(i, "escalation_mass") == rows[i].escalation_mass);
    }
    CHECK(t.footer().front() == std::pair<std::string, std::string>{"configured_value", "0.1"});

    auto bad = c;
    bad.review->review_loss = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(run_review_frontier(bad), ConfigError);
}

TEST_CASE("custom network scenario")
{
    const auto t = run_custom_network(shipped("custom_network.yaml"));
    double total = 0.0;
    for (std::size_t r = 0; r < t.rows().size(); ++r)
        total += t.number(r, "probability");
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    double gap = 0.0;
    for (const auto& [k, v] : t.footer())
        if (k == "gap")
            gap = std::stod(v);
    CHECK(gap >= -1e-9);
}

TEST_CASE("subcommand runners")
{
    const auto c = shipped("toolkit.yaml");
    const auto enc = run_encode(c);
    CHECK(enc.columns() == std::vector<std::string>{"k", "value", "encoder_partition", "exact"});
    CHECK(enc.rows().size() == 6);

    const auto tax = run_tax(c);
    const auto tax_bits = run_tax(c, RunOptions{true, {}});
    CHECK(tax_bits.number(0, "gap") == doctest::Approx(tax.number(0, "gap") / std::log(2.0)).epsilon(1e-11));
    CHECK(tax_bits.number(1, "gap") == tax.number(1, "gap"));
    for (std::size_t r = 0; r < 2; ++r)
        CHECK(std::abs(tax.number(r, "gap") - tax.number(r, "expected_divergence")) <= 1e-9);

    const auto chain = run_chain(c);
    CHECK(chain.rows().size() == 3);

    const auto dom = run_dominance(shipped("dominance.yaml"));
    bool separated = false;
    for (const auto& [k, v] : dom.footer())
        if (k == "margin")
            separated = std::stod(v) >= kMinSeparation;
    CHECK(separated);

    auto garbled = shipped("dominance.yaml");
    garbled.dominance->t = ChannelSpec{};
    const auto witness = run_dominance(garbled);
    CHECK(witness.footer().front() == std::pair<std::string, std::string>{"dominated", "1"});
}

TEST_CASE("determinism: same config and seed give byte-identical CSV")
{
    for (const char* name : {"relay_depth.yaml", "interface.yaml", "distortion_scatter.yaml", "signal_expansion.yaml",
                             "review_frontier.yaml", "custom_network.yaml"}) {
        const auto c = shipped(name);
        CHECK(run_scenario(c).to_csv() == run_scenario(c).to_csv());
    }
    auto c = shipped("distortion_scatter.yaml");
    const auto first = run_scenario(c).to_csv();
    c.seed = *c.seed + 1;
    CHECK(run_scenario(c).to_csv() != first);
}

TEST_CASE("pearson")
{
    const double x[] = {1, 2, 3, 4};
    const double y[] = {2, 4, 6, 8};
    const double z[] = {8, 6, 4, 2};
    const double flat[] = {1, 1, 1, 1};
    CHECK(*pearson(x, y) == doctest::Approx(1.0));
    CHECK(*pearson(x, z) == doctest::Approx(-1.0));
    CHECK_FALSE(pearson(x, flat).has_value());
    CHECK_THROWS_AS(pearson(std::span<const double>(x, 2), std::span<const double>(y, 2)), InputError);
}

TEST_CASE("run_scenario needs a scenario kind")
{
    auto c = shipped("toolkit.yaml");
    CHECK_THROWS_AS(run_scenario(c), ConfigError);
}
