#include "delnet/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "delnet/blackwell.hpp"
#include "delnet/channel.hpp"
#include "delnet/errors.hpp"
#include "delnet/network.hpp"
#include "delnet/partitions.hpp"
#include "delnet/review.hpp"
#include "delnet/rng.hpp"

namespace delnet {

namespace {

template <class T>
const T& need(const std::optional<T>& section, const char* name)
{
    if (!section)
        throw ConfigError(std::string("config has no '") + name + "' section");
    return *section;
}

void add_provenance(ResultTable& table, const ScenarioConfig& config)
{
    table.add_footer("config_hash", config_hash(config));
    table.add_footer("seed", config.seed ? std::to_string(*config.seed) : "none");
    table.add_footer("version", kToolVersion);
}

double info_unit(double nats, const RunOptions& options) { return options.bits ? nats_to_bits(nats) : nats; }

std::int64_t flag(bool b) { return b ? 1 : 0; }

std::vector<Kernel> build_hops(const std::vector<ChannelSpec>& specs, Space from, const std::string& prefix)
{
    std::vector<Kernel> hops;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        hops.push_back(specs[i].build(from, prefix + std::to_string(i + 1)));
        from = hops.back().to();
    }
    return hops;
}

} // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw InputError("pearson: samples differ in length");
    if (x.size() < 3)
        throw InputError("pearson: needs at least 3 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    // spreads at roundoff level count as constant samples
    auto flat = [](std::span<const double> v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo <= kStructuralTol;
    };
    if (flat(x) || flat(y) || sxx <= 0.0 || syy <= 0.0)
        return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

ResultTable run_relay_depth(const ScenarioConfig& config, const RunOptions&)
{
    const auto& spec = need(config.relay_depth, "relay_depth");
    const auto prior = build_prior(config);
    const auto signal = build_single_signal(config);
    const auto loss = build_loss(config);

    ResultTable table({"depth", "accuracy", "gap_to_centralized"});
    for (std::size_t depth : spec.depths) {
        const auto hops = build_hops(std::vector<ChannelSpec>(depth, spec.hop), signal.to(), "hop");
        const auto gap = collapse_gap(relay_chain(prior, signal, hops, loss), loss);
        table.add_row({static_cast<std::int64_t>(depth), 1.0 - gap.network_loss, gap.gap});
    }
    add_provenance(table, config);
    return table;
}

ResultTable run_interface(const ScenarioConfig& config, const RunOptions& options)
{
    const auto& spec = need(config.interface, "interface");
    const auto loss = build_loss(config);
    auto structured = build_state(config, options.limits);
    auto prose = structured;

    ResultTable table({"stage", "accuracy_structured", "accuracy_prose", "structured_dominates"});
    for (std::size_t stage = 0; stage <= spec.stages; ++stage) {
        if (stage > 0) {
            if (spec.structured_optimal) {
                const auto sol = optimal_encoder(structured, BudgetSpec(spec.budget), loss, options.limits);
                structured = apply_encoder(structured, sol.encoder, "S" + std::to_string(stage));
            }
            const auto garble = spec.prose.build(prose.alphabet(), "P" + std::to_string(stage));
            prose = apply_encoder(prose, garble, "P" + std::to_string(stage));
        }
        const bool dominates = is_dominated(experiment_of(prose), experiment_of(structured)).dominated();
        table.add_row({static_cast<std::int64_t>(stage), 1.0 - bayes_risk(structured, loss).value,
                       1.0 - bayes_risk(prose, loss).value, flag(dominates)});
    }
    add_provenance(table, config);
    return table;
}

ResultTable run_distortion_scatter(const ScenarioConfig& config, const RunOptions& options)
{
    const auto& spec = need(config.distortion_scatter, "distortion_scatter");
    if (!config.seed)
        throw ConfigError("distortion-scatter draws random instances and needs a seed");
    const auto loss = build_loss(config);
    const Space labels("Y", config.model.labels);
    const Space b_space("B", config.model.labels);
    const std::size_t n = labels.size();
    Rng rng(*config.seed);

    ResultTable table({"instance", "kl", "accuracy_drop"});
    std::vector<double> kls, drops;
    for (std::size_t i = 0; i < spec.instances; ++i) {
        const Distribution prior(labels, rng.simplex(n));
        // signal: keep the label with probability alpha, else a random row
        const double alpha = rng.uniform(0.5, 1.0);
        Matrix rows(n, n);
        for (std::size_t y = 0; y < n; ++y) {
            const auto noise = rng.simplex(n);
            for (std::size_t b = 0; b < n; ++b)
                rows(y, b) = (1.0 - alpha) * noise[b] + (b == y ? alpha : 0.0);
        }
        const auto direct = InformationState::from_experiment(prior, Kernel(labels, b_space, rows), "B");
        const auto hops = build_hops(std::vector<ChannelSpec>(spec.hops, spec.relay), b_space, "R");
        Kernel relay = Kernel::identity(b_space);
        for (const auto& h : hops)
            relay = compose(relay, h);
        const double kl = communication_tax(direct, relay, ScoringRule::Log).expected_divergence;
        const auto relayed = apply_encoder(direct, relay, "R");
        const double drop = bayes_risk(relayed, loss).value - bayes_risk(direct, loss).value;
        kls.push_back(kl);
        drops.push_back(drop);
        table.add_row({static_cast<std::int64_t>(i), info_unit(kl, options), drop});
    }
    if (kls.size() < 3) {
        table.add_footer("pearson_r", "refused");
    } else {
        const auto r = pearson(kls, drops);
        table.add_footer("pearson_r", r ? format_number(*r) : "undefined");
    }
    add_provenance(table, config);
    return table;
}

ResultTable run_signal_expansion(const ScenarioConfig& config, const RunOptions& options)
{
    const auto& spec = need(config.signal_expansion, "signal_expansion");
    const auto prior = build_prior(config);
    const auto signal = build_single_signal(config);
    const auto loss = build_loss(config);
    const auto message = spec.message.build(signal.to(), "M");

    ResultTable table({"setting", "accuracy_without_w", "accuracy_with_w", "gain", "redundant"});
    for (const auto& s : spec.settings) {
        Space from;
        std::vector<std::string> parents;
        switch (s.source) {
        case ExpansionSetting::Source::Label:
            from = prior.space();
            parents = {"Y"};
            break;
        case ExpansionSetting::Source::Message:
            from = message.to();
            parents = {"M"};
            break;
        case ExpansionSetting::Source::Joint: {
            const Space parts[] = {prior.space(), message.to()};
            from = product_space("W.in", parts);
            parents = {"Y", "M"};
            break;
        }
        }
        const auto w = s.channel.build(from, "W");
        const JointModel model("Y", prior,
                               {ModelVariable{"B", {"Y"}, signal}, ModelVariable{"M", {"B"}, message},
                                ModelVariable{"W", parents, w}});
        const auto joint = full_joint(model, options.limits);
        const std::string m_vars[] = {"M"};
        const std::string w_vars[] = {"W"};
        const auto g = verification_gain(joint, "Y", m_vars, w_vars, loss);
        table.add_row({s.name, 1.0 - g.value_m, 1.0 - g.value_mw, g.gain, flag(g.redundant)});
    }
    add_provenance(table, config);
    return table;
}

ResultTable run_review_frontier(const ScenarioConfig& config, const RunOptions& options)
{
    const auto& spec = need(config.review, "review");
    if (spec.grid.empty())
        throw ConfigError("review.grid is empty");
    const auto state = build_state(config, options.limits);
    const auto loss = build_loss(config);

    ResultTable table({"cost", "escalation_mass", "value"});
    for (const auto& row : review_frontier(state, loss, spec.grid))
        table.add_row({row.cost, row.escalation_mass, row.value});
    if (!spec.review_loss.empty()) {
        auto r = spec.review_loss;
        if (r.size() == 1)
            r.assign(state.size(), r.front());
        if (r.size() != state.size())
            throw ConfigError("review.review_loss has " + std::to_string(spec.review_loss.size()) + " entries for " +
                              std::to_string(state.size()) + " information symbols");
        const auto result = optimal_review(ReviewProblem(state, loss, r));
        table.add_footer("configured_value", format_number(result.value));
        table.add_footer("configured_escalation_mass", format_number(result.escalation_mass));
    }
    add_provenance(table, config);
    return table;
}

ResultTable run_custom_network(const ScenarioConfig& config, const RunOptions& options)
{
    const auto net = build_network(config, options.limits);
    const auto loss = build_loss(config);
    const auto joint = terminal_joint(net, options.limits);

    auto columns = joint.names();
    columns.push_back("probability");
    ResultTable table(columns);
    std::vector<std::size_t> a(joint.names().size());
    for (std::size_t cell = 0; cell < joint.cells(); ++cell) {
        joint.decode(cell, a);
        std::vector<Cell> row;
        for (std::size_t v = 0; v < a.size(); ++v)
            row.emplace_back(joint.spaces()[v].label(a[v]));
        row.emplace_back(joint.probs()[cell]);
        table.add_row(std::move(row));
    }
    const auto gap = collapse_gap(net, loss, options.limits);
    table.add_footer("network_loss", format_number(gap.network_loss));
    table.add_footer("centralized_value", format_number(gap.centralized_value));
    table.add_footer("gap", format_number(gap.gap));
    add_provenance(table, config);
    return table;
}

ResultTable run_scenario(const ScenarioConfig& config, const RunOptions& options)
{
    if (!config.scenario)
        throw ConfigError("config does not name a scenario");
    switch (*config.scenario) {
    case ScenarioKind::RelayDepth: return run_relay_depth(config, options);
    case ScenarioKind::Interface: return run_interface(config, options);
    case ScenarioKind::DistortionScatter: return run_distortion_scatter(config, options);
    case ScenarioKind::SignalExpansion: return run_signal_expansion(config, options);
    case ScenarioKind::ReviewFrontier: return run_review_frontier(config, options);
    case ScenarioKind::CustomNetwork: return run_custom_network(config, options);
    }
    throw ConfigError("unknown scenario");
}

ResultTable run_encode(const ScenarioConfig& config, const RunOptions& options)
{
    const EncodeSpec spec = config.encode ? *config.encode : EncodeSpec{};
    const auto state = build_state(config, options.limits);
    Objective objective = spec.objective == "loss" ? Objective(build_loss(config))
                                                   : Objective(parse_scoring_rule(spec.objective));
    const bool in_nats = spec.objective == "log";

    auto budgets = spec.budgets;
    if (budgets.empty())
        for (std::size_t k = 1; k <= state.size(); ++k)
            budgets.push_back(k);

    ResultTable table({"k", "value", "encoder_partition", "exact"});
    for (std::size_t k : budgets) {
        const auto sol = spec.greedy ? greedy_encoder(state, BudgetSpec(k), objective)
                                     : optimal_encoder(state, BudgetSpec(k), objective, options.limits);
        table.add_row({static_cast<std::int64_t>(k), in_nats ? info_unit(sol.value, options) : sol.value,
                       format_partition(sol.partition, state.alphabet().labels()), flag(sol.exact)});
    }
    table.add_footer("objective", spec.objective);
    add_provenance(table, config);
    return table;
}

ResultTable run_tax(const ScenarioConfig& config, const RunOptions& options)
{
    const auto& spec = need(config.tax, "tax");
    const auto state = build_state(config, options.limits);
    const auto channel = spec.channel.build(state.alphabet(), "M");

    ResultTable table({"rule", "value_h", "value_m", "gap", "expected_divergence", "conditional_mi"});
    for (auto rule : {ScoringRule::Log, ScoringRule::Brier}) {
        const auto t = communication_tax(state, channel, rule);
        auto unit = [&](double v) { return rule == ScoringRule::Log ? info_unit(v, options) : v; };
        table.add_row({std::string(to_string(rule)), unit(t.value_h), unit(t.value_m), unit(t.gap),
                       unit(t.expected_divergence), info_unit(t.conditional_mi, options)});
    }
    add_provenance(table, config);
    return table;
}

ResultTable run_chain(const ScenarioConfig& config, const RunOptions& options)
{
    const auto& spec = need(config.chain, "chain");
    auto initial = build_state(config, options.limits);
    auto hops = build_hops(spec.hops, initial.alphabet(), "M");
    const auto result = chain_decomposition(ChainSpec(std::move(initial), std::move(hops)));

    ResultTable table({"stage", "term", "cumulative"});
    for (const auto& s : result.stages)
        table.add_row({static_cast<std::int64_t>(s.stage), info_unit(s.term, options), info_unit(s.cumulative, options)});
    table.add_footer("end_to_end", format_number(info_unit(result.end_to_end, options)));
    add_provenance(table, config);
    return table;
}

ResultTable run_dominance(const ScenarioConfig& config, const RunOptions&)
{
    const auto& spec = need(config.dominance, "dominance");
    const auto prior = build_prior(config);
    const Experiment s(prior, spec.s.build(prior.space(), "S"));
    const Experiment t(prior, spec.t.build(prior.space(), "T"));
    const auto result = is_dominated(s, t);

    if (result.dominated()) {
        std::vector<std::string> columns{"T"};
        for (const auto& l : s.kernel.to().labels())
            columns.push_back(l);
        ResultTable table(columns);
        const auto& g = result.witness->channel;
        for (std::size_t i = 0; i < g.from().size(); ++i) {
            std::vector<Cell> row{g.from().label(i)};
            for (double v : g.row(i))
                row.emplace_back(v);
            table.add_row(std::move(row));
        }
        table.add_footer("dominated", "1");
        table.add_footer("residual", format_number(result.witness->residual));
        add_provenance(table, config);
        return table;
    }

    const auto sep = separating_loss(s, t, config.seed.value_or(0x5eed));
    std::vector<std::string> columns{"action"};
    for (const auto& l : sep.loss.labels().labels())
        columns.push_back(l);
    ResultTable table(columns);
    for (std::size_t a = 0; a < sep.loss.actions().size(); ++a) {
        std::vector<Cell> row{sep.loss.actions().label(a)};
        for (double v : sep.loss.values().row(a))
            row.emplace_back(v);
        table.add_row(std::move(row));
    }
    table.add_footer("dominated", "0");
    table.add_footer("risk_s", format_number(sep.risk_s));
    table.add_footer("risk_t", format_number(sep.risk_t));
    table.add_footer("margin", format_number(sep.margin));
    table.add_footer("from_certificate", sep.from_certificate ? "1" : "0");
    add_provenance(table, config);
    return table;
}

} // namespace delnet
