#include "delnet/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "delnet/errors.hpp"
#include "delnet/partitions.hpp"

namespace delnet {

Encoder partition_encoder(const Space& from, std::span<const std::size_t> rgs)
{
    if (rgs.size() != from.size())
        throw InputError("partition has " + std::to_string(rgs.size()) + " entries for " +
                         std::to_string(from.size()) + " symbols");
    std::size_t blocks = 0;
    for (std::size_t b : rgs)
        blocks = std::max(blocks, b + 1);
    const Space messages = Space::indexed("M", blocks, "m");
    return {Kernel::deterministic(from, messages, rgs), true};
}

BudgetSpec::BudgetSpec(std::size_t k_) : k(k_)
{
    if (k == 0)
        throw InputError("budget k must be at least 1");
}

InformationState apply_encoder(const InformationState& state, const Kernel& channel, std::string name)
{
    if (channel.from().size() != state.size())
        throw InputError("encoder expects " + std::to_string(channel.from().size()) + " input symbols, state '" +
                         state.name() + "' has " + std::to_string(state.size()));
    const std::size_t nm = channel.to().size();
    const std::size_t ny = state.labels().size();
    const Distribution marginal = state.label_marginal();
    std::vector<double> weights(nm, 0.0);
    Matrix post(nm, ny);
    for (std::size_t h = 0; h < state.size(); ++h) {
        const double w = state.weight(h);
        if (w == 0.0)
            continue;
        const auto pi = state.posterior(h);
        for (std::size_t m = 0; m < nm; ++m) {
            const double joint = w * channel(h, m);
            if (joint == 0.0)
                continue;
            weights[m] += joint;
            for (std::size_t y = 0; y < ny; ++y)
                post(m, y) += joint * pi[y];
        }
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t m = 0; m < nm; ++m) {
        if (weights[m] > 0.0) {
            double row = 0.0;
            for (std::size_t y = 0; y < ny; ++y)
                row += post(m, y);
            for (std::size_t y = 0; y < ny; ++y)
                post(m, y) /= row;
        } else {
            for (std::size_t y = 0; y < ny; ++y)
                post(m, y) = marginal[y];
        }
        weights[m] /= total;
    }
    Space alphabet(name, channel.to().labels());
    return InformationState(std::move(name), std::move(alphabet), state.labels(), std::move(weights),
                            std::move(post));
}

namespace {

// Contribution of one message to the Bayes value, given the unnormalized
// joint mass P(M = m, Y = .) routed to it.
class BlockValue {
public:
    explicit BlockValue(const Objective& objective) : objective_(objective) {}

    double operator()(std::span<const double> mass) const
    {
        const double w = std::accumulate(mass.begin(), mass.end(), 0.0);
        if (w <= 0.0)
            return 0.0;
        if (const auto* loss = std::get_if<LossMatrix>(&objective_)) {
            const auto lambda = posterior_losses(mass, *loss);
            return *std::min_element(lambda.begin(), lambda.end());
        }
        double v = 0.0;
        if (std::get<ScoringRule>(objective_) == ScoringRule::Log) {
            for (double m : mass)
                if (m > 0.0)
                    v -= m * std::log(m / w);
            return v;
        }
        for (double m : mass)
            v += m * m;
        return w - v / w;
    }

private:
    const Objective& objective_;
};

void check_objective(const InformationState& state, const Objective& objective)
{
    if (const auto* loss = std::get_if<LossMatrix>(&objective))
        if (!loss->labels().same_elements(state.labels()))
            throw InputError("loss labels do not match the state's labels");
}

EncoderSolution identity_solution(const InformationState& state, const Objective& objective)
{
    std::vector<std::size_t> rgs(state.size());
    std::iota(rgs.begin(), rgs.end(), std::size_t{0});
    EncoderSolution out{partition_encoder(state.alphabet(), rgs), rgs, bayes_value(state, objective), true, 1};
    return out;
}

} // namespace

EncoderSolution optimal_encoder(const InformationState& state, BudgetSpec budget, const Objective& objective,
                                const Limits& limits)
{
    check_objective(state, objective);
    const std::size_t n = state.size();
    if (budget.k >= n)
        return identity_solution(state, objective);
    if (n > limits.max_partition_symbols)
        throw EnumerationLimitError("partition search over " + std::to_string(n) +
                                        " symbols exceeds the cap of " +
                                        std::to_string(limits.max_partition_symbols) +
                                        "; use the greedy encoder (non-exact) instead",
                                    n, limits.max_partition_symbols);

    const std::size_t k = budget.k;
    const std::size_t ny = state.labels().size();
    const Matrix joint = state.joint();
    const BlockValue value(objective);

    std::vector<double> remaining(n + 1, 0.0);  // sum of singleton values from i on
    for (std::size_t i = n; i-- > 0;)
        remaining[i] = remaining[i + 1] + value(joint.row(i));

    constexpr double kTieEps = 1e-12;
    Matrix blocks(k, ny);
    std::vector<double> block_value(k, 0.0);
    Matrix saved(n, ny);
    std::vector<std::size_t> assignment(n, 0);
    EncoderSolution best;
    best.value = kInfinity;

    auto dfs = [&](auto&& self, std::size_t i, std::size_t used, double current) -> void {
        if (current + remaining[i] >= best.value - kTieEps)
            return;
        ++best.nodes;
        if (i == n) {
            best.value = current;
            best.partition = assignment;
            return;
        }
        const std::size_t limit = std::min(used + 1, k);
        for (std::size_t b = 0; b < limit; ++b) {
            auto row = blocks.row(b);
            std::copy(row.begin(), row.end(), saved.row(i).begin());
            const double before = block_value[b];
            for (std::size_t y = 0; y < ny; ++y)
                row[y] += joint(i, y);
            block_value[b] = value(row);
            assignment[i] = b;
            self(self, i + 1, std::max(used, b + 1), current - before + block_value[b]);
            std::copy(saved.row(i).begin(), saved.row(i).end(), row.begin());
            block_value[b] = before;
        }
    };
    dfs(dfs, 0, 0, 0.0);

    best.encoder = partition_encoder(state.alphabet(), best.partition);
    best.exact = true;
    return best;
}

EncoderSolution greedy_encoder(const InformationState& state, BudgetSpec budget, const Objective& objective)
{
    check_objective(state, objective);
    const std::size_t n = state.size();
    const std::size_t ny = state.labels().size();
    const Matrix joint = state.joint();
    const BlockValue value(objective);

    std::vector<std::vector<double>> mass;
    std::vector<std::vector<std::size_t>> members;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        mass.emplace_back(joint.row(i).begin(), joint.row(i).end());
        members.push_back({i});
        values.push_back(value(mass.back()));
    }
    std::vector<double> merged(ny);
    while (mass.size() > budget.k) {
        std::size_t bi = 0, bj = 1;
        double best_cost = kInfinity;
        for (std::size_t i = 0; i < mass.size(); ++i)
            for (std::size_t j = i + 1; j < mass.size(); ++j) {
                for (std::size_t y = 0; y < ny; ++y)
                    merged[y] = mass[i][y] + mass[j][y];
                const double cost = value(merged) - values[i] - values[j];
                if (cost < best_cost) {
                    best_cost = cost;
                    bi = i;
                    bj = j;
                }
            }
        for (std::size_t y = 0; y < ny; ++y)
            mass[bi][y] += mass[bj][y];
        values[bi] = value(mass[bi]);
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        mass.erase(mass.begin() + static_cast<std::ptrdiff_t>(bj));
        values.erase(values.begin() + static_cast<std::ptrdiff_t>(bj));
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    std::vector<std::size_t> blocks(n, 0);
    for (std::size_t b = 0; b < members.size(); ++b)
        for (std::size_t i : members[b])
            blocks[i] = b;

    EncoderSolution out;
    out.partition = canonical_partition(blocks);
    out.encoder = partition_encoder(state.alphabet(), out.partition);
    out.value = std::accumulate(values.begin(), values.end(), 0.0);
    out.exact = false;
    out.nodes = 1;
    return out;
}

TaxResult communication_tax(const InformationState& state, const Kernel& channel, ScoringRule rule)
{
    const InformationState received = apply_encoder(state, channel);
    TaxResult out;
    out.value_h = scoring_value(state, rule);
    out.value_m = scoring_value(received, rule);
    out.gap = out.value_m - out.value_h;

    const std::size_t nh = state.size();
    const std::size_t nm = received.size();
    const std::size_t ny = state.labels().size();
    std::vector<double> yhm(ny * nh * nm, 0.0);
    for (std::size_t h = 0; h < nh; ++h)
        for (std::size_t m = 0; m < nm; ++m) {
            const double p = state.weight(h) * channel(h, m);
            if (p == 0.0)
                continue;
            out.expected_divergence += p * divergence(rule, state.posterior(h), received.posterior(m));
            for (std::size_t y = 0; y < ny; ++y)
                yhm[(y * nh + h) * nm + m] = p * state.posterior(h)[y];
        }
    out.conditional_mi = conditional_mutual_information(yhm, ny, nh, nm);
    return out;
}

ChainSpec::ChainSpec(InformationState initial_, std::vector<Kernel> hops_)
    : initial(std::move(initial_)), hops(std::move(hops_))
{
    std::size_t width = initial.size();
    for (std::size_t i = 0; i < hops.size(); ++i) {
        if (hops[i].from().size() != width)
            throw InputError("chain hop " + std::to_string(i + 1) + " expects " +
                             std::to_string(hops[i].from().size()) + " input symbols, previous stage has " +
                             std::to_string(width));
        width = hops[i].to().size();
    }
}

ChainResult chain_decomposition(const ChainSpec& chain)
{
    ChainResult out;
    InformationState current = chain.initial;
    const std::size_t ny = current.labels().size();
    for (std::size_t k = 0; k < chain.hops.size(); ++k) {
        const Kernel& hop = chain.hops[k];
        InformationState next = apply_encoder(current, hop, "M" + std::to_string(k + 1));
        const std::size_t nh = current.size();
        const std::size_t nm = next.size();
        std::vector<double> yhm(ny * nh * nm, 0.0);
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t m = 0; m < nm; ++m)
                for (std::size_t y = 0; y < ny; ++y)
                    yhm[(y * nh + h) * nm + m] = current.weight(h) * current.posterior(h)[y] * hop(h, m);
        const double term = conditional_mutual_information(yhm, ny, nh, nm);
        out.total += term;
        out.stages.push_back({k + 1, term, out.total});
        current = std::move(next);
    }
    out.end_to_end = scoring_value(current, ScoringRule::Log) - scoring_value(chain.initial, ScoringRule::Log);
    return out;
}

} // namespace delnet
