#include <doctest.h>

#include <cmath>

#include "delnet/errors.hpp"
#include "delnet/network.hpp"
#include "random_network.hpp"
#include "support.hpp"

using namespace delnet;
using testing::Q;
using testing::ratio;

namespace {

JointModel perfect_binary()
{
    const Space y("Y", {"0", "1"});
    return JointModel("Y", Distribution::uniform(y), {{"B", {"Y"}, Kernel(y, Space("B", {"0", "1"}), Matrix::identity(2))}});
}

} // namespace

TEST_CASE("terminal_joint and network_loss examples")
{
    SUBCASE("single identity node")
    {
        const DelegatedNetwork net(perfect_binary(), {{"act", {"B"}, Kernel::identity(Space("A", {"0", "1"})), true}});
        const auto j = terminal_joint(net);
        CHECK(j.names() == std::vector<std::string>{"Y", "B", "A"});
        double correct = 0.0;
        std::vector<std::size_t> a(3);
        for (std::size_t c = 0; c < j.cells(); ++c) {
            j.decode(c, a);
            if (a[0] == a[2])
                correct += j.probs()[c];
        }
        CHECK(correct == doctest::Approx(1.0));
        CHECK(network_loss(net, LossMatrix::zero_one(Space("Y", {"0", "1"}))) == doctest::Approx(0.0));
    }
    SUBCASE("constant relay makes A independent of Y")
    {
        const Space m("m", {"0", "1"});
        const DelegatedNetwork net(
            perfect_binary(),
            {{"relay", {"B"}, Kernel::constant(Space("B", {"0", "1"}), Distribution(m, {0.3, 0.7})), false},
             {"act", {"relay"}, Kernel(m, Space("A", {"0", "1"}), Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}})), true}});
        const auto j = terminal_joint(net);
        const std::string ya[] = {"Y", "A"};
        const std::string yy[] = {"Y"};
        const std::string aa[] = {"A"};
        const auto pya = marginal(j, ya);
        const auto py = marginal(j, yy);
        const auto pa = marginal(j, aa);
        for (std::size_t y = 0; y < 2; ++y)
            for (std::size_t a = 0; a < 2; ++a)
                CHECK(pya.probs()[y * 2 + a] == doctest::Approx(py.probs()[y] * pa.probs()[a]).epsilon(1e-14));
        CHECK(network_loss(net, LossMatrix::zero_one(Space("Y", {"0", "1"}))) == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("three-hop 0.9-fidelity relay against exhaustive rational summation")
{
    const Space y = Space::indexed("Y", 4);
    const Space b = Space::indexed("B", 4);
    const JointModel model("Y", Distribution::uniform(y), {{"B", {"Y"}, Kernel(y, b, Matrix::identity(4))}});
    const auto hop = [](const std::string& id) { return Kernel::symmetric(Space::indexed(id, 4), 0.9); };
    const DelegatedNetwork net(model, {{"h1", {"B"}, hop("h1"), false},
                                       {"h2", {"h1"}, hop("h2"), false},
                                       {"h3", {"h2"}, hop("h3"), true}});

    // oracle: sum over every (y, b, m1, m2, a) path with exact hop entries 9/10 and 1/30
    auto entry = [](std::size_t i, std::size_t j) { return i == j ? ratio(9, 10) : ratio(1, 30); };
    std::vector<Q> p(4 * 4 * 4, Q(0));  // (y, b, a)
    for (std::size_t yy = 0; yy < 4; ++yy)
        for (std::size_t m1 = 0; m1 < 4; ++m1)
            for (std::size_t m2 = 0; m2 < 4; ++m2)
                for (std::size_t a = 0; a < 4; ++a)
                    p[(yy * 4 + yy) * 4 + a] += ratio(1, 4) * entry(yy, m1) * entry(m1, m2) * entry(m2, a);

    const auto j = terminal_joint(net);
    REQUIRE(j.cells() == 64);
    Q loss(0);
    for (std::size_t c = 0; c < 64; ++c) {
        CHECK(j.probs()[c] == doctest::Approx(testing::to_double(p[c])).epsilon(1e-14));
        if (c % 4 != c / 16)
            loss += p[c];
    }
    const auto zero_one = LossMatrix::zero_one(y);
    CHECK(network_loss(net, zero_one) == doctest::Approx(testing::to_double(loss)).epsilon(1e-14));
    // symmetric channel eigenvalue: P(correct) = 1/4 + 3/4 ((4q - 1)/3)^3
    const double lambda = (4 * 0.9 - 1) / 3;
    CHECK(testing::to_double(loss) == doctest::Approx(0.75 - 0.75 * lambda * lambda * lambda).epsilon(1e-14));

    const auto gap = collapse_gap(net, zero_one);
    CHECK(gap.centralized_value == doctest::Approx(0.0));
    CHECK(gap.gap == doctest::Approx(gap.network_loss - 0.0));
}

TEST_CASE("collapse_gap is zero for a centralized Bayes terminal")
{
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto y = testing::space("Y", rng.between(2, 4));
        const auto b = testing::space("B", rng.between(1, 4));
        const auto z = testing::space("Z", rng.between(1, 3));
        const JointModel model("Y", testing::random_distribution(rng, y),
                               {{"B", {"Y"}, testing::random_kernel(rng, y, b)}, {"Z", {"Y"}, testing::random_kernel(rng, y, z)}});
        const auto loss = testing::random_loss(rng, y, rng.between(1, 4));
        const Space in[] = {b, z};
        const DelegatedNetwork raw(model, {{"act", {"B", "Z"},
                                            Kernel::constant(product_space("in", in), Distribution::uniform(loss.actions())),
                                            true}});
        const auto gap = collapse_gap(with_bayes_terminal(raw, loss), loss);
        CHECK(std::abs(gap.gap) <= 1e-12);
    }
}

TEST_CASE("property: collapse bound on random networks")
{
    Rng rng(424242);
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = testing::random_network(rng);
        for (int l = 0; l < 3; ++l) {
            const auto loss = testing::random_loss(rng, net.exogenous().prior().space(), net.action_space().size());
            const auto gap = collapse_gap(net, loss);
            CHECK(gap.gap >= -1e-9);
        }
    }
}

TEST_CASE("property: replacing the terminal rule with the Bayes policy never hurts")
{
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = testing::random_network(rng);
        const auto loss = testing::random_loss(rng, net.exogenous().prior().space(), net.action_space().size());
        CHECK(network_loss(with_bayes_terminal(net, loss), loss) <= network_loss(net, loss) + 1e-9);
    }
}

TEST_CASE("property: each extra hop on a chain weakly raises the re-optimized risk")
{
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto y = testing::space("Y", rng.between(2, 4));
        const auto prior = testing::random_distribution(rng, y);
        Kernel path = testing::random_kernel(rng, y, testing::space("B", rng.between(1, 5)));
        const auto loss = testing::random_loss(rng, y, rng.between(1, 4));
        double previous = bayes_risk(InformationState::from_experiment(prior, path), loss).value;
        std::vector<Kernel> hops;
        for (int h = 0; h < 4; ++h) {
            hops.push_back(testing::random_kernel(rng, path.to(), testing::space("M" + std::to_string(h), rng.between(1, 5))));
            path = compose(path, hops.back());
            const double risk = bayes_risk(InformationState::from_experiment(prior, path), loss).value;
            CHECK(risk >= previous - 1e-9);
            previous = risk;
        }
    }
}

TEST_CASE("relay_chain attains the Bayes risk of the composed experiment")
{
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto y = testing::space("Y", rng.between(2, 4));
        const auto prior = testing::random_distribution(rng, y);
        const auto signal = testing::random_kernel(rng, y, testing::space("B", rng.between(1, 4)));
        std::vector<Kernel> hops;
        Kernel path = signal;
        for (std::size_t h = 0, n = rng.between(0, 3); h < n; ++h) {
            hops.push_back(testing::random_kernel(rng, path.to(), testing::space("M" + std::to_string(h), rng.between(1, 4))));
            path = compose(path, hops.back());
        }
        const auto loss = testing::random_loss(rng, y, rng.between(1, 3));
        const double expected = bayes_risk(InformationState::from_experiment(prior, path), loss).value;
        CHECK(std::abs(network_loss(relay_chain(prior, signal, hops, loss), loss) - expected) <= 1e-12);
    }
}

TEST_CASE("fan-out replicates a message to every reader")
{
    const Space m("m", {"0", "1"});
    const Space in[] = {m, m};
    // terminal reports whether its two copies of the same message differ
    const std::size_t differ[] = {0, 1, 1, 0};
    const DelegatedNetwork net(
        perfect_binary(),
        {{"coin", {}, Kernel::constant(Space("none", {"*"}), Distribution::uniform(m)), false},
         {"act", {"coin", "coin"}, Kernel::deterministic(product_space("in", in), Space("A", {"0", "1"}), differ), true}});
    const auto j = terminal_joint(net);
    const std::string a[] = {"A"};
    CHECK(marginal(j, a).probs()[1] == 0.0);
}

TEST_CASE("malformed graphs are rejected")
{
    const Space s("s", {"0", "1"});
    const auto id = Kernel::identity(s);
    CHECK_THROWS_AS(DelegatedNetwork(perfect_binary(), {{"a", {"b"}, id, false}, {"b", {"a"}, id, true}}), GraphError);
    CHECK_THROWS_AS(DelegatedNetwork(perfect_binary(), {{"a", {"B"}, id, false}}), GraphError);
    CHECK_THROWS_AS(DelegatedNetwork(perfect_binary(), {{"a", {"B"}, id, true}, {"b", {"B"}, id, true}}), GraphError);
    CHECK_THROWS_AS(DelegatedNetwork(perfect_binary(), {{"a", {"Y"}, id, true}}), GraphError);
    CHECK_THROWS_AS(DelegatedNetwork(perfect_binary(), {{"a", {"Q"}, id, true}}), GraphError);
    CHECK_THROWS_AS(DelegatedNetwork(perfect_binary(), {{"a", {"B", "B"}, id, true}}), InputError);

    const DelegatedNetwork ok(perfect_binary(), {{"a", {"B"}, id, true}});
    CHECK_THROWS_AS(network_loss(ok, LossMatrix::zero_one(Space::indexed("Y", 3))), InputError);
}

TEST_CASE("terminal_joint respects the enumeration cap")
{
    Rng rng(2);
    const auto net = testing::random_network(rng);
    Limits tight;
    tight.max_cells = 1;
    CHECK_THROWS_AS(terminal_joint(net, tight), EnumerationLimitError);
}

TEST_CASE("topological order follows declaration order among ready nodes")
{
    const Space s("s", {"0", "1"});
    const auto id = Kernel::identity(s);
    const DelegatedNetwork net(perfect_binary(), {{"late", {"early"}, id, true}, {"early", {"B"}, id, false}, {"side", {"B"}, id, false}});
    CHECK(net.topological_order() == std::vector<std::size_t>{1, 0, 2});
    const auto edges = net.edges();
    REQUIRE(edges.size() == 1);
    CHECK(edges.front() == std::pair<std::string, std::string>{"early", "late"});
}
