#pragma once

// Finite DAG delegated networks evaluated by exact enumeration.

#include <string>
#include <utility>
#include <vector>

#include "delnet/decision.hpp"
#include "delnet/prob.hpp"

namespace delnet {

/// A node reads the outputs of its inputs (exogenous signal names or
/// upstream node ids, in order) and emits one symbol drawn from `rule`. Any
/// private randomization lives inside the stochastic rule.
struct NetworkNode {
    std::string id;
    std::vector<std::string> inputs;
    Kernel rule;
    bool terminal = false;
};

/// Exogenous model over (Y, B, Z_1..Z_n) plus a DAG of nodes with exactly one
/// terminal node whose output space is the action set.
class DelegatedNetwork {
public:
    /// Name of the action column in terminal_joint tables.
    static constexpr const char* kActionName = "A";

    DelegatedNetwork(JointModel exogenous, std::vector<NetworkNode> nodes);

    const JointModel& exogenous() const { return exogenous_; }
    const std::vector<NetworkNode>& nodes() const { return nodes_; }
    /// Node indices in evaluation order; ties resolved by declaration order.
    const std::vector<std::size_t>& topological_order() const { return order_; }
    const NetworkNode& terminal() const { return nodes_[terminal_]; }
    std::size_t terminal_index() const { return terminal_; }
    const Space& action_space() const { return terminal().rule.to(); }

    /// Exogenous signal names, label excluded.
    std::vector<std::string> signal_names() const;
    /// Directed node-to-node edges (source id, target id).
    std::vector<std::pair<std::string, std::string>> edges() const;

private:
    JointModel exogenous_;
    std::vector<NetworkNode> nodes_;
    std::vector<std::size_t> order_;
    std::size_t terminal_ = 0;
};

/// Joint table over (Y, exogenous signals..., A).
JointTable terminal_joint(const DelegatedNetwork& net, const Limits& limits = {});

/// E[ell(A, Y)].
double network_loss(const DelegatedNetwork& net, const LossMatrix& loss, const Limits& limits = {});

struct CollapseGap {
    double network_loss = 0.0;
    double centralized_value = 0.0;
    double gap = 0.0;
};

/// Network loss against the Bayes risk of a centralized decision maker that
/// sees every exogenous signal.
CollapseGap collapse_gap(const DelegatedNetwork& net, const LossMatrix& loss, const Limits& limits = {});

/// Deterministic kernel from the state's alphabet to the loss's actions that
/// plays the Bayes act on every symbol.
Kernel bayes_rule_kernel(const InformationState& state, const LossMatrix& loss);

/// Copy of `net` whose terminal node plays the Bayes act for `loss` on the
/// tuple of its inputs.
DelegatedNetwork with_bayes_terminal(const DelegatedNetwork& net, const LossMatrix& loss, const Limits& limits = {});

/// Chain Y -> B -> hop_1 -> ... -> hop_L -> decide, where `decide` plays the
/// Bayes act for `loss` on whatever reaches it.
DelegatedNetwork relay_chain(const Distribution& prior, const Kernel& signal, const std::vector<Kernel>& hops,
                             const LossMatrix& loss);

} // namespace delnet
