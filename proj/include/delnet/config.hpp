#pragma once

// Scenario configuration: a YAML document with nested sections and explicit
// matrix literals. Unknown keys are errors; every error carries the line of
// the offending node.
//
//   scenario: relay-depth          # needed by `delnet run`
//   seed: 7
//   model:
//     labels: [A, B, C, D]
//     prior: [0.25, 0.25, 0.25, 0.25]        # default uniform
//     variables:                              # default: B = Y exactly
//       - {name: B, parents: [Y], kernel: {fidelity: 0.8}}
//   loss: {actions: [A, B, C, D], matrix: [[...], ...]}   # default 0-1
//   relay_depth: {depths: [1, 2, 3, 5], hop: {fidelity: 0.9}}
//
// A channel is one of: identity | {fidelity: q} | {matrix: [[...]]} |
// {partition: [0, 0, 1]} | {constant: [p...]}.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delnet/decision.hpp"
#include "delnet/network.hpp"
#include "delnet/prob.hpp"

namespace delnet {

enum class ScenarioKind { RelayDepth, Interface, DistortionScatter, SignalExpansion, ReviewFrontier, CustomNetwork };

std::string to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(const std::string& name);

struct ChannelSpec {
    enum class Kind { Identity, Fidelity, Matrix, Partition, Constant };

    Kind kind = Kind::Identity;
    double fidelity = 1.0;
    std::vector<std::vector<double>> matrix;
    std::vector<std::size_t> partition;
    std::vector<double> constant;
    int line = 0;

    /// Kernel from `from` into a space named `to_id`. Fidelity and identity
    /// stay on `from`'s symbols; other kinds use `to_labels` when given.
    Kernel build(const Space& from, const std::string& to_id, const std::vector<std::string>& to_labels = {}) const;

    bool operator==(const ChannelSpec& o) const
    {
        return kind == o.kind && fidelity == o.fidelity && matrix == o.matrix && partition == o.partition &&
               constant == o.constant;
    }
};

struct VariableSpec {
    std::string name;
    std::vector<std::string> alphabet;  // empty: derived from the kernel
    std::vector<std::string> parents;
    ChannelSpec kernel;
    int line = 0;

    bool operator==(const VariableSpec& o) const
    {
        return name == o.name && alphabet == o.alphabet && parents == o.parents && kernel == o.kernel;
    }
};

struct ModelSpec {
    std::vector<std::string> labels;
    std::vector<double> prior;  // empty: uniform
    std::vector<VariableSpec> variables;
    int line = 0;

    bool operator==(const ModelSpec& o) const
    {
        return labels == o.labels && prior == o.prior && variables == o.variables;
    }
};

struct LossSpec {
    std::vector<std::string> actions;
    std::vector<std::vector<double>> matrix;
    int line = 0;

    bool operator==(const LossSpec& o) const { return actions == o.actions && matrix == o.matrix; }
};

struct RelayDepthSpec {
    std::vector<std::size_t> depths;
    ChannelSpec hop;
    bool operator==(const RelayDepthSpec&) const = default;
};

struct InterfaceSpec {
    std::size_t stages = 3;
    std::size_t budget = 1;
    bool structured_optimal = true;  // false: identity interface
    ChannelSpec prose;
    bool operator==(const InterfaceSpec&) const = default;
};

struct ScatterSpec {
    std::size_t instances = 50;
    std::size_t hops = 1;
    ChannelSpec relay;
    bool operator==(const ScatterSpec&) const = default;
};

struct ExpansionSetting {
    enum class Source { Label, Message, Joint };
    std::string name;
    Source source = Source::Label;
    ChannelSpec channel;
    bool operator==(const ExpansionSetting&) const = default;
};

struct SignalExpansionSpec {
    ChannelSpec message;
    std::vector<ExpansionSetting> settings;
    bool operator==(const SignalExpansionSpec&) const = default;
};

struct ReviewSpec {
    std::vector<double> grid;
    /// Empty, one scalar for every symbol, or one entry per symbol.
    std::vector<double> review_loss;
    bool operator==(const ReviewSpec&) const = default;
};

struct NodeSpec {
    std::string id;
    std::vector<std::string> inputs;
    std::vector<std::string> alphabet;  // empty: derived from the rule
    bool bayes = false;                 // terminal plays the Bayes act
    ChannelSpec rule;
    bool terminal = false;
    int line = 0;

    bool operator==(const NodeSpec& o) const
    {
        return id == o.id && inputs == o.inputs && alphabet == o.alphabet && bayes == o.bayes &&
               (bayes || rule == o.rule) && terminal == o.terminal;
    }
};

struct NetworkSpec {
    std::vector<NodeSpec> nodes;
    bool operator==(const NetworkSpec&) const = default;
};

struct EncodeSpec {
    std::vector<std::size_t> budgets;
    std::string objective = "loss";  // loss | log | brier
    bool greedy = false;
    bool operator==(const EncodeSpec&) const = default;
};

struct TaxSpec {
    ChannelSpec channel;
    bool operator==(const TaxSpec&) const = default;
};

struct ChainSectionSpec {
    std::vector<ChannelSpec> hops;
    bool operator==(const ChainSectionSpec&) const = default;
};

struct DominanceSpec {
    ChannelSpec s;
    ChannelSpec t;
    bool operator==(const DominanceSpec&) const = default;
};

struct ScenarioConfig {
    std::optional<ScenarioKind> scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    ModelSpec model;
    std::optional<LossSpec> loss;

    std::optional<RelayDepthSpec> relay_depth;
    std::optional<InterfaceSpec> interface;
    std::optional<ScatterSpec> distortion_scatter;
    std::optional<SignalExpansionSpec> signal_expansion;
    std::optional<ReviewSpec> review;
    std::optional<NetworkSpec> network;
    std::optional<EncodeSpec> encode;
    std::optional<TaxSpec> tax;
    std::optional<ChainSectionSpec> chain;
    std::optional<DominanceSpec> dominance;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parse and validate. Throws ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Canonical YAML; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// FNV-1a 64 of the canonical form with the output path cleared, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

// Builders from a validated config. Errors are ConfigError with line numbers.
Distribution build_prior(const ScenarioConfig& config);
JointModel build_model(const ScenarioConfig& config);
LossMatrix build_loss(const ScenarioConfig& config);
/// The model's only signal kernel Y -> B (identity when none is declared).
Kernel build_single_signal(const ScenarioConfig& config);
/// State of Y given every declared signal.
InformationState build_state(const ScenarioConfig& config, const Limits& limits = {});
DelegatedNetwork build_network(const ScenarioConfig& config, const Limits& limits = {});

} // namespace delnet
