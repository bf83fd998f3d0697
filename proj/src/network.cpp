#include "delnet/network.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "delnet/errors.hpp"

namespace delnet {

DelegatedNetwork::DelegatedNetwork(JointModel exogenous, std::vector<NetworkNode> nodes)
    : exogenous_(std::move(exogenous)), nodes_(std::move(nodes))
{
    if (nodes_.empty())
        throw GraphError("network has no nodes");
    if (exogenous_.position(kActionName))
        throw InputError(std::string("exogenous variable may not be named '") + kActionName + "'");

    std::map<std::string, std::size_t, std::less<>> node_index;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (exogenous_.position(nodes_[i].id))
            throw GraphError("node id '" + nodes_[i].id + "' clashes with an exogenous variable");
        if (!node_index.emplace(nodes_[i].id, i).second)
            throw GraphError("duplicate node id '" + nodes_[i].id + "'");
    }

    const auto exo_spaces = exogenous_.spaces();
    std::size_t terminals = 0;
    std::vector<std::vector<std::size_t>> downstream(nodes_.size());
    std::vector<std::size_t> indegree(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        if (node.terminal) {
            ++terminals;
            terminal_ = i;
        }
        for (const auto& in : node.inputs) {
            if (in == exogenous_.label_name())
                throw GraphError("node '" + node.id + "' may not read the label directly");
            if (exogenous_.position(in))
                continue;
            auto it = node_index.find(in);
            if (it == node_index.end())
                throw GraphError("node '" + node.id + "' reads unknown input '" + in + "'");
            downstream[it->second].push_back(i);
            ++indegree[i];
        }
    }
    if (terminals != 1)
        throw GraphError("network needs exactly one terminal node, found " + std::to_string(terminals));

    // Kahn's algorithm, lowest declaration index first
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (indegree[i] == 0)
            ready.push_back(i);
    while (!ready.empty()) {
        auto it = std::min_element(ready.begin(), ready.end());
        const std::size_t v = *it;
        ready.erase(it);
        order_.push_back(v);
        for (std::size_t w : downstream[v])
            if (--indegree[w] == 0)
                ready.push_back(w);
    }
    if (order_.size() != nodes_.size())
        throw GraphError("network graph has a cycle");

    for (const auto& node : nodes_) {
        std::size_t rows = 1;
        for (const auto& in : node.inputs) {
            if (auto pos = exogenous_.position(in))
                rows *= exo_spaces[*pos].size();
            else
                rows *= nodes_[node_index.find(in)->second].rule.to().size();
        }
        if (node.rule.from().size() != rows)
            throw InputError("node '" + node.id + "': rule has " + std::to_string(node.rule.from().size()) +
                             " rows, inputs need " + std::to_string(rows));
    }
}

std::vector<std::string> DelegatedNetwork::signal_names() const
{
    auto names = exogenous_.names();
    names.erase(names.begin());
    return names;
}

std::vector<std::pair<std::string, std::string>> DelegatedNetwork::edges() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& node : nodes_)
        for (const auto& in : node.inputs)
            if (!exogenous_.position(in))
                out.emplace_back(in, node.id);
    return out;
}

namespace {

// Input wiring resolved to positions: exogenous signals index into the
// signal assignment, nodes into the node-output assignment.
struct Wire {
    bool exogenous;
    std::size_t index;
    std::size_t size;
};

} // namespace

JointTable terminal_joint(const DelegatedNetwork& net, const Limits& limits)
{
    const auto& model = net.exogenous();
    const auto& nodes = net.nodes();
    const JointTable exo = full_joint(model, limits);
    const auto signals = net.signal_names();

    std::map<std::string, std::size_t, std::less<>> node_index;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        node_index.emplace(nodes[i].id, i);

    // only ancestors of the terminal influence A
    std::vector<bool> needed(nodes.size(), false);
    needed[net.terminal_index()] = true;
    const auto& order = net.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (!needed[*it])
            continue;
        for (const auto& in : nodes[*it].inputs)
            if (auto n = node_index.find(in); n != node_index.end())
                needed[n->second] = true;
    }
    std::vector<std::size_t> active;
    for (std::size_t v : order)
        if (needed[v])
            active.push_back(v);

    std::vector<std::vector<Wire>> wires(nodes.size());
    for (std::size_t v : active)
        for (const auto& in : nodes[v].inputs) {
            if (auto pos = model.position(in))
                wires[v].push_back({true, *pos - 1, exo.spaces()[*pos].size()});
            else {
                const std::size_t u = node_index.find(in)->second;
                wires[v].push_back({false, u, nodes[u].rule.to().size()});
            }
        }

    const auto signal_table = signals.empty() ? std::optional<JointTable>{} : std::optional(marginal(exo, signals));
    const std::size_t signal_cells = signal_table ? signal_table->cells() : 1;
    std::vector<std::size_t> work_sizes{exo.cells()};
    for (std::size_t v : active)
        work_sizes.push_back(nodes[v].rule.to().size());
    const std::size_t work = checked_product(work_sizes);
    if (work > limits.max_cells)
        throw EnumerationLimitError("network enumeration needs " + std::to_string(work) + " steps; cap is " +
                                        std::to_string(limits.max_cells),
                                    work, limits.max_cells);

    // P(A | e) for every signal assignment e; depends on the nodes only
    const Space& actions = net.action_space();
    Matrix action_given_signal(signal_cells, actions.size());
    std::vector<std::size_t> e(signals.size());
    std::vector<std::size_t> out(nodes.size(), 0);
    const std::size_t terminal = net.terminal_index();
    for (std::size_t cell = 0; cell < signal_cells; ++cell) {
        if (signal_table) {
            if (signal_table->probs()[cell] == 0.0)
                continue;
            signal_table->decode(cell, e);
        }
        auto row = action_given_signal.row(cell);
        auto visit = [&](auto&& self, std::size_t step, double p) -> void {
            const std::size_t v = active[step];
            std::size_t r = 0;
            for (const auto& w : wires[v])
                r = r * w.size + (w.exogenous ? e[w.index] : out[w.index]);
            const auto probs = nodes[v].rule.row(r);
            if (v == terminal) {
                for (std::size_t a = 0; a < probs.size(); ++a)
                    row[a] += p * probs[a];
                return;
            }
            for (std::size_t s = 0; s < probs.size(); ++s) {
                if (probs[s] == 0.0)
                    continue;
                out[v] = s;
                self(self, step + 1, p * probs[s]);
            }
        };
        visit(visit, 0, 1.0);
    }

    std::vector<std::string> names = exo.names();
    names.emplace_back(DelegatedNetwork::kActionName);
    std::vector<Space> spaces = exo.spaces();
    spaces.push_back(actions);
    std::vector<double> probs(exo.cells() * actions.size(), 0.0);
    std::vector<std::size_t> assignment(exo.names().size());
    for (std::size_t cell = 0; cell < exo.cells(); ++cell) {
        const double p = exo.probs()[cell];
        if (p == 0.0)
            continue;
        exo.decode(cell, assignment);
        std::size_t sig = 0;
        for (std::size_t k = 1; k < assignment.size(); ++k)
            sig = sig * exo.spaces()[k].size() + assignment[k];
        for (std::size_t a = 0; a < actions.size(); ++a)
            probs[cell * actions.size() + a] = p * action_given_signal(sig, a);
    }
    return JointTable(std::move(names), std::move(spaces), std::move(probs));
}

double network_loss(const DelegatedNetwork& net, const LossMatrix& loss, const Limits& limits)
{
    const Space& labels = net.exogenous().prior().space();
    if (!loss.labels().same_elements(labels))
        throw InputError("loss labels do not match the network's label space");
    if (!loss.actions().same_elements(net.action_space()))
        throw InputError("loss actions do not match the terminal node's output space");
    const JointTable joint = terminal_joint(net, limits);
    const std::vector<std::string> ya{net.exogenous().label_name(), DelegatedNetwork::kActionName};
    const JointTable pya = marginal(joint, ya);
    double value = 0.0;
    for (std::size_t y = 0; y < labels.size(); ++y)
        for (std::size_t a = 0; a < loss.actions().size(); ++a)
            value += pya.probs()[y * loss.actions().size() + a] * loss(a, y);
    return value;
}

CollapseGap collapse_gap(const DelegatedNetwork& net, const LossMatrix& loss, const Limits& limits)
{
    CollapseGap out;
    out.network_loss = network_loss(net, loss, limits);
    const auto signals = net.signal_names();
    const InformationState central =
        signals.empty() ? InformationState::uninformed(net.exogenous().prior(), "E")
                        : InformationState::from_joint(full_joint(net.exogenous(), limits),
                                                       net.exogenous().label_name(), signals, "E");
    out.centralized_value = bayes_risk(central, loss).value;
    out.gap = out.network_loss - out.centralized_value;
    return out;
}

Kernel bayes_rule_kernel(const InformationState& state, const LossMatrix& loss)
{
    const auto policy = bayes_risk(state, loss).policy;
    return Kernel::deterministic(state.alphabet(), loss.actions(), policy);
}

DelegatedNetwork with_bayes_terminal(const DelegatedNetwork& net, const LossMatrix& loss, const Limits& limits)
{
    // probe: a terminal that forwards its input tuple exposes the law of that tuple
    auto nodes = net.nodes();
    const std::size_t t = net.terminal_index();
    const Space inputs("input", std::vector<std::string>(nodes[t].rule.from().labels()));
    nodes[t].rule = Kernel::identity(inputs);
    const DelegatedNetwork probe(net.exogenous(), nodes);
    const JointTable joint = terminal_joint(probe, limits);
    const std::vector<std::string> observed{DelegatedNetwork::kActionName};
    const auto state = InformationState::from_joint(joint, net.exogenous().label_name(), observed, "input");
    nodes[t].rule = Kernel(net.terminal().rule.from(), loss.actions(), bayes_rule_kernel(state, loss).matrix());
    return DelegatedNetwork(net.exogenous(), std::move(nodes));
}

DelegatedNetwork relay_chain(const Distribution& prior, const Kernel& signal, const std::vector<Kernel>& hops,
                             const LossMatrix& loss)
{
    JointModel model("Y", prior, {ModelVariable{"B", {"Y"}, signal}});
    std::vector<NetworkNode> nodes;
    Kernel end_to_end = signal;
    std::string previous = "B";
    for (std::size_t i = 0; i < hops.size(); ++i) {
        const std::string id = "hop" + std::to_string(i + 1);
        nodes.push_back({id, {previous}, hops[i], false});
        end_to_end = compose(end_to_end, hops[i]);
        previous = id;
    }
    const auto received = InformationState::from_experiment(prior, end_to_end, previous);
    nodes.push_back({"decide", {previous}, bayes_rule_kernel(received, loss), true});
    return DelegatedNetwork(std::move(model), std::move(nodes));
}

} // namespace delnet
