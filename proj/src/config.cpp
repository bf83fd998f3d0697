#include "delnet/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "delnet/errors.hpp"

namespace delnet {

namespace {

const char* const kLabelName = "Y";

std::string format_sum(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!node.IsMap())
        throw ConfigError(where + " must be a mapping", line_of(node));
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError("unknown key '" + key + "' in " + where, line_of(kv.first));
    }
}

double to_double(const YAML::Node& node, const std::string& what)
{
    double v = 0.0;
    if (!node.IsScalar() || !YAML::convert<double>::decode(node, v))
        throw ConfigError(what + " must be a number", line_of(node));
    return v;
}

std::size_t to_count(const YAML::Node& node, const std::string& what)
{
    long long v = 0;
    if (!node.IsScalar() || !YAML::convert<long long>::decode(node, v) || v < 0)
        throw ConfigError(what + " must be a nonnegative integer", line_of(node));
    return static_cast<std::size_t>(v);
}

std::string to_text(const YAML::Node& node, const std::string& what)
{
    if (!node.IsScalar())
        throw ConfigError(what + " must be a string", line_of(node));
    return node.Scalar();
}

bool to_bool(const YAML::Node& node, const std::string& what)
{
    bool v = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, v))
        throw ConfigError(what + " must be true or false", line_of(node));
    return v;
}

template <class F>
auto to_list(const YAML::Node& node, const std::string& what, F&& item)
{
    if (!node.IsSequence())
        throw ConfigError(what + " must be a list", line_of(node));
    std::vector<decltype(item(node))> out;
    for (const auto& e : node)
        out.push_back(item(e));
    return out;
}

std::vector<double> to_numbers(const YAML::Node& node, const std::string& what)
{
    return to_list(node, what, [&](const YAML::Node& e) { return to_double(e, what + " entry"); });
}

std::vector<std::size_t> to_counts(const YAML::Node& node, const std::string& what)
{
    return to_list(node, what, [&](const YAML::Node& e) { return to_count(e, what + " entry"); });
}

std::vector<std::string> to_texts(const YAML::Node& node, const std::string& what)
{
    return to_list(node, what, [&](const YAML::Node& e) { return to_text(e, what + " entry"); });
}

std::vector<std::vector<double>> to_matrix(const YAML::Node& node, const std::string& what)
{
    auto rows = to_list(node, what, [&](const YAML::Node& e) { return to_numbers(e, what + " row"); });
    if (rows.empty())
        throw ConfigError(what + " has no rows", line_of(node));
    for (const auto& r : rows)
        if (r.size() != rows.front().size() || r.empty())
            throw ConfigError(what + " rows must be nonempty and of equal length", line_of(node));
    return rows;
}

YAML::Node require(const YAML::Node& node, const char* key, const std::string& where)
{
    auto v = node[key];
    if (!v)
        throw ConfigError(where + " is missing '" + key + "'", line_of(node));
    return v;
}

void check_row_stochastic(const std::vector<std::vector<double>>& rows, const std::string& what, int line)
{
    for (const auto& r : rows) {
        double sum = 0.0;
        for (double p : r) {
            if (!(p >= 0.0))
                throw ConfigError(what + " has a negative or missing entry", line);
            sum += p;
        }
        if (std::abs(sum - 1.0) > kStructuralTol)
            throw ConfigError(what + " row sums to " + format_sum(sum) + ", not 1", line);
    }
}


ChannelSpec parse_channel(const YAML::Node& node, const std::string& what)
{
    ChannelSpec c;
    c.line = line_of(node);
    if (node.IsScalar()) {
        if (node.Scalar() != "identity")
            throw ConfigError(what + ": unknown channel '" + node.Scalar() + "'", c.line);
        return c;
    }
    check_keys(node, {"fidelity", "matrix", "partition", "constant"}, what);
    if (node.size() != 1)
        throw ConfigError(what + " must name exactly one channel kind", c.line);
    if (auto f = node["fidelity"]) {
        c.kind = ChannelSpec::Kind::Fidelity;
        c.fidelity = to_double(f, what + " fidelity");
        if (!(c.fidelity >= 0.0 && c.fidelity <= 1.0))
            throw ConfigError(what + " fidelity must lie in [0, 1]", c.line);
    } else if (auto m = node["matrix"]) {
        c.kind = ChannelSpec::Kind::Matrix;
        c.matrix = to_matrix(m, what + " matrix");
        check_row_stochastic(c.matrix, what + " matrix", c.line);
    } else if (auto p = node["partition"]) {
        c.kind = ChannelSpec::Kind::Partition;
        c.partition = to_counts(p, what + " partition");
        if (c.partition.empty())
            throw ConfigError(what + " partition is empty", c.line);
    } else {
        c.kind = ChannelSpec::Kind::Constant;
        c.constant = to_numbers(node["constant"], what + " constant");
        if (c.constant.empty())
            throw ConfigError(what + " constant is empty", c.line);
        check_row_stochastic({c.constant}, what + " constant", c.line);
    }
    return c;
}

ModelSpec parse_model(const YAML::Node& node)
{
    check_keys(node, {"labels", "prior", "variables"}, "model");
    ModelSpec m;
    m.line = line_of(node);
    m.labels = to_texts(require(node, "labels", "model"), "model.labels");
    if (m.labels.empty())
        throw ConfigError("model.labels is empty", m.line);
    if (auto p = node["prior"]) {
        m.prior = to_numbers(p, "model.prior");
        if (m.prior.size() != m.labels.size())
            throw ConfigError("model.prior has " + std::to_string(m.prior.size()) + " entries for " +
                                  std::to_string(m.labels.size()) + " labels",
                              line_of(p));
        check_row_stochastic({m.prior}, "model.prior", line_of(p));
    }
    if (auto vars = node["variables"]) {
        if (!vars.IsSequence())
            throw ConfigError("model.variables must be a list", line_of(vars));
        for (const auto& v : vars) {
            check_keys(v, {"name", "alphabet", "parents", "kernel"}, "model variable");
            VariableSpec s;
            s.line = line_of(v);
            s.name = to_text(require(v, "name", "model variable"), "variable name");
            if (auto a = v["alphabet"])
                s.alphabet = to_texts(a, "variable alphabet");
            s.parents = v["parents"] ? to_texts(v["parents"], "variable parents") : std::vector<std::string>{kLabelName};
            s.kernel = parse_channel(require(v, "kernel", "model variable"), "variable '" + s.name + "' kernel");
            m.variables.push_back(std::move(s));
        }
    }
    return m;
}

NodeSpec parse_node(const YAML::Node& node)
{
    check_keys(node, {"id", "inputs", "rule", "alphabet", "terminal"}, "network node");
    NodeSpec n;
    n.line = line_of(node);
    n.id = to_text(require(node, "id", "network node"), "node id");
    if (auto in = node["inputs"])
        n.inputs = to_texts(in, "node inputs");
    if (auto a = node["alphabet"])
        n.alphabet = to_texts(a, "node alphabet");
    if (auto t = node["terminal"])
        n.terminal = to_bool(t, "node terminal");
    auto rule = require(node, "rule", "network node");
    if (rule.IsScalar() && rule.Scalar() == "bayes") {
        n.bayes = true;
        n.rule.line = line_of(rule);
        if (!n.terminal)
            throw ConfigError("only the terminal node may use the bayes rule", n.line);
    } else {
        n.rule = parse_channel(rule, "node '" + n.id + "' rule");
    }
    return n;
}

ScenarioConfig parse_root(const YAML::Node& root)
{
    check_keys(root,
               {"scenario", "seed", "output", "model", "loss", "relay_depth", "interface", "distortion_scatter",
                "signal_expansion", "review", "network", "encode", "tax", "chain", "dominance"},
               "config");
    ScenarioConfig c;
    if (auto s = root["scenario"]) {
        const auto name = to_text(s, "scenario");
        c.scenario = parse_scenario_kind(name);
        if (!c.scenario)
            throw ConfigError("unknown scenario '" + name + "'", line_of(s));
    }
    if (auto s = root["seed"]) {
        std::uint64_t v = 0;
        if (!s.IsScalar() || s.Scalar().empty() || s.Scalar()[0] == '-' ||
            !YAML::convert<std::uint64_t>::decode(s, v))
            throw ConfigError("seed must be a nonnegative integer", line_of(s));
        c.seed = v;
    }
    if (auto o = root["output"])
        c.output = to_text(o, "output");
    c.model = parse_model(require(root, "model", "config"));

    if (auto l = root["loss"]) {
        check_keys(l, {"actions", "matrix"}, "loss");
        LossSpec s;
        s.line = line_of(l);
        s.actions = to_texts(require(l, "actions", "loss"), "loss.actions");
        s.matrix = to_matrix(require(l, "matrix", "loss"), "loss.matrix");
        c.loss = std::move(s);
    }
    if (auto r = root["relay_depth"]) {
        check_keys(r, {"depths", "hop"}, "relay_depth");
        RelayDepthSpec s;
        s.depths = to_counts(require(r, "depths", "relay_depth"), "relay_depth.depths");
        if (s.depths.empty())
            throw ConfigError("relay_depth.depths is empty", line_of(r));
        for (auto d : s.depths)
            if (d < 1)
                throw ConfigError("relay depths must be at least 1", line_of(r["depths"]));
        s.hop = parse_channel(require(r, "hop", "relay_depth"), "relay_depth.hop");
        c.relay_depth = std::move(s);
    }
    if (auto r = root["interface"]) {
        check_keys(r, {"stages", "budget", "structured", "prose"}, "interface");
        InterfaceSpec s;
        if (auto v = r["stages"])
            s.stages = to_count(v, "interface.stages");
        if (auto v = r["budget"]) {
            s.budget = to_count(v, "interface.budget");
            if (s.budget < 1)
                throw ConfigError("interface.budget must be at least 1", line_of(v));
        }
        if (auto v = r["structured"]) {
            const auto kind = to_text(v, "interface.structured");
            if (kind != "optimal" && kind != "identity")
                throw ConfigError("interface.structured must be 'optimal' or 'identity'", line_of(v));
            s.structured_optimal = kind == "optimal";
        }
        s.prose = parse_channel(require(r, "prose", "interface"), "interface.prose");
        c.interface = std::move(s);
    }
    if (auto r = root["distortion_scatter"]) {
        check_keys(r, {"instances", "hops", "relay"}, "distortion_scatter");
        ScatterSpec s;
        if (auto v = r["instances"])
            s.instances = to_count(v, "distortion_scatter.instances");
        if (auto v = r["hops"])
            s.hops = to_count(v, "distortion_scatter.hops");
        s.relay = parse_channel(require(r, "relay", "distortion_scatter"), "distortion_scatter.relay");
        c.distortion_scatter = std::move(s);
    }
    if (auto r = root["signal_expansion"]) {
        check_keys(r, {"message", "settings"}, "signal_expansion");
        SignalExpansionSpec s;
        s.message = parse_channel(require(r, "message", "signal_expansion"), "signal_expansion.message");
        auto settings = require(r, "settings", "signal_expansion");
        if (!settings.IsSequence() || settings.size() == 0)
            throw ConfigError("signal_expansion.settings must be a nonempty list", line_of(settings));
        for (const auto& e : settings) {
            check_keys(e, {"name", "source", "channel"}, "signal_expansion setting");
            ExpansionSetting x;
            x.name = to_text(require(e, "name", "setting"), "setting name");
            const auto src = to_text(require(e, "source", "setting"), "setting source");
            if (src == "label")
                x.source = ExpansionSetting::Source::Label;
            else if (src == "message")
                x.source = ExpansionSetting::Source::Message;
            else if (src == "joint")
                x.source = ExpansionSetting::Source::Joint;
            else
                throw ConfigError("setting source must be label, message or joint", line_of(e["source"]));
            x.channel = parse_channel(require(e, "channel", "setting"), "setting '" + x.name + "' channel");
            s.settings.push_back(std::move(x));
        }
        c.signal_expansion = std::move(s);
    }
    if (auto r = root["review"]) {
        check_keys(r, {"grid", "review_loss"}, "review");
        ReviewSpec s;
        if (auto g = r["grid"])
            s.grid = to_numbers(g, "review.grid");
        if (auto v = r["review_loss"])
            s.review_loss = v.IsScalar() ? std::vector<double>{to_double(v, "review.review_loss")}
                                         : to_numbers(v, "review.review_loss");
        for (double x : s.grid)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ConfigError("review costs must be finite and nonnegative", line_of(r["grid"]));
        for (double x : s.review_loss)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ConfigError("review losses must be finite and nonnegative", line_of(r["review_loss"]));
        c.review = std::move(s);
    }
    if (auto r = root["network"]) {
        check_keys(r, {"nodes"}, "network");
        NetworkSpec s;
        auto nodes = require(r, "nodes", "network");
        if (!nodes.IsSequence())
            throw ConfigError("network.nodes must be a list", line_of(nodes));
        for (const auto& n : nodes)
            s.nodes.push_back(parse_node(n));
        c.network = std::move(s);
    }
    if (auto r = root["encode"]) {
        check_keys(r, {"budgets", "objective", "greedy"}, "encode");
        EncodeSpec s;
        if (auto v = r["budgets"]) {
            s.budgets = to_counts(v, "encode.budgets");
            for (auto k : s.budgets)
                if (k < 1)
                    throw ConfigError("encode budgets must be at least 1", line_of(v));
        }
        if (auto v = r["objective"]) {
            s.objective = to_text(v, "encode.objective");
            if (s.objective != "loss" && s.objective != "log" && s.objective != "brier")
                throw ConfigError("encode.objective must be loss, log or brier", line_of(v));
        }
        if (auto v = r["greedy"])
            s.greedy = to_bool(v, "encode.greedy");
        c.encode = std::move(s);
    }
    if (auto r = root["tax"]) {
        check_keys(r, {"channel"}, "tax");
        c.tax = TaxSpec{parse_channel(require(r, "channel", "tax"), "tax.channel")};
    }
    if (auto r = root["chain"]) {
        check_keys(r, {"hops"}, "chain");
        ChainSectionSpec s;
        auto hops = require(r, "hops", "chain");
        if (!hops.IsSequence())
            throw ConfigError("chain.hops must be a list", line_of(hops));
        for (const auto& h : hops)
            s.hops.push_back(parse_channel(h, "chain hop"));
        c.chain = std::move(s);
    }
    if (auto r = root["dominance"]) {
        check_keys(r, {"S", "T"}, "dominance");
        DominanceSpec s;
        s.s = parse_channel(require(r, "S", "dominance"), "dominance.S");
        s.t = parse_channel(require(r, "T", "dominance"), "dominance.T");
        c.dominance = std::move(s);
    }
    return c;
}

void emit_channel(YAML::Emitter& out, const ChannelSpec& c)
{
    using K = ChannelSpec::Kind;
    if (c.kind == K::Identity) {
        out << "identity";
        return;
    }
    out << YAML::Flow << YAML::BeginMap;
    switch (c.kind) {
    case K::Fidelity:
        out << YAML::Key << "fidelity" << YAML::Value << c.fidelity;
        break;
    case K::Matrix:
        out << YAML::Key << "matrix" << YAML::Value << YAML::BeginSeq;
        for (const auto& r : c.matrix)
            out << YAML::Flow << r;
        out << YAML::EndSeq;
        break;
    case K::Partition:
        out << YAML::Key << "partition" << YAML::Value << YAML::Flow << c.partition;
        break;
    case K::Constant:
        out << YAML::Key << "constant" << YAML::Value << YAML::Flow << c.constant;
        break;
    case K::Identity:
        break;
    }
    out << YAML::EndMap;
}

void emit_matrix(YAML::Emitter& out, const std::vector<std::vector<double>>& m)
{
    out << YAML::BeginSeq;
    for (const auto& r : m)
        out << YAML::Flow << r;
    out << YAML::EndSeq;
}

} // namespace

std::string to_string(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::RelayDepth: return "relay-depth";
    case ScenarioKind::Interface: return "interface";
    case ScenarioKind::DistortionScatter: return "distortion-scatter";
    case ScenarioKind::SignalExpansion: return "signal-expansion";
    case ScenarioKind::ReviewFrontier: return "review-frontier";
    case ScenarioKind::CustomNetwork: return "custom-network";
    }
    return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(const std::string& name)
{
    for (auto k : {ScenarioKind::RelayDepth, ScenarioKind::Interface, ScenarioKind::DistortionScatter,
                   ScenarioKind::SignalExpansion, ScenarioKind::ReviewFrontier, ScenarioKind::CustomNetwork})
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

ScenarioConfig parse_config(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
    if (!root || root.IsNull())
        throw ConfigError("config is empty");
    try {
        return parse_root(root);
    } catch (const YAML::Exception& e) {
        throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ScenarioConfig& c)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    if (c.scenario)
        out << YAML::Key << "scenario" << YAML::Value << to_string(*c.scenario);
    if (c.seed)
        out << YAML::Key << "seed" << YAML::Value << *c.seed;
    if (c.output)
        out << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << *c.output;

    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "labels" << YAML::Value << YAML::Flow << c.model.labels;
    if (!c.model.prior.empty())
        out << YAML::Key << "prior" << YAML::Value << YAML::Flow << c.model.prior;
    if (!c.model.variables.empty()) {
        out << YAML::Key << "variables" << YAML::Value << YAML::BeginSeq;
        for (const auto& v : c.model.variables) {
            out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << v.name;
            if (!v.alphabet.empty())
                out << YAML::Key << "alphabet" << YAML::Value << YAML::Flow << v.alphabet;
            out << YAML::Key << "parents" << YAML::Value << YAML::Flow << v.parents;
            out << YAML::Key << "kernel" << YAML::Value;
            emit_channel(out, v.kernel);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;

    if (c.loss) {
        out << YAML::Key << "loss" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "actions" << YAML::Value << YAML::Flow << c.loss->actions;
        out << YAML::Key << "matrix" << YAML::Value;
        emit_matrix(out, c.loss->matrix);
        out << YAML::EndMap;
    }
    if (c.relay_depth) {
        out << YAML::Key << "relay_depth" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "depths" << YAML::Value << YAML::Flow << c.relay_depth->depths;
        out << YAML::Key << "hop" << YAML::Value;
        emit_channel(out, c.relay_depth->hop);
        out << YAML::EndMap;
    }
    if (c.interface) {
        out << YAML::Key << "interface" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "stages" << YAML::Value << c.interface->stages;
        out << YAML::Key << "budget" << YAML::Value << c.interface->budget;
        out << YAML::Key << "structured" << YAML::Value << (c.interface->structured_optimal ? "optimal" : "identity");
        out << YAML::Key << "prose" << YAML::Value;
        emit_channel(out, c.interface->prose);
        out << YAML::EndMap;
    }
    if (c.distortion_scatter) {
        out << YAML::Key << "distortion_scatter" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "instances" << YAML::Value << c.distortion_scatter->instances;
        out << YAML::Key << "hops" << YAML::Value << c.distortion_scatter->hops;
        out << YAML::Key << "relay" << YAML::Value;
        emit_channel(out, c.distortion_scatter->relay);
        out << YAML::EndMap;
    }
    if (c.signal_expansion) {
        out << YAML::Key << "signal_expansion" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "message" << YAML::Value;
        emit_channel(out, c.signal_expansion->message);
        out << YAML::Key << "settings" << YAML::Value << YAML::BeginSeq;
        for (const auto& s : c.signal_expansion->settings) {
            static const char* const sources[] = {"label", "message", "joint"};
            out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << s.name;
            out << YAML::Key << "source" << YAML::Value << sources[static_cast<int>(s.source)];
            out << YAML::Key << "channel" << YAML::Value;
            emit_channel(out, s.channel);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    if (c.review) {
        out << YAML::Key << "review" << YAML::Value << YAML::BeginMap;
        if (!c.review->grid.empty())
            out << YAML::Key << "grid" << YAML::Value << YAML::Flow << c.review->grid;
        if (c.review->review_loss.size() == 1)
            out << YAML::Key << "review_loss" << YAML::Value << c.review->review_loss.front();
        else if (!c.review->review_loss.empty())
            out << YAML::Key << "review_loss" << YAML::Value << YAML::Flow << c.review->review_loss;
        out << YAML::EndMap;
    }
    if (c.network) {
        out << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
        for (const auto& n : c.network->nodes) {
            out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << n.id;
            out << YAML::Key << "inputs" << YAML::Value << YAML::Flow << n.inputs;
            if (!n.alphabet.empty())
                out << YAML::Key << "alphabet" << YAML::Value << YAML::Flow << n.alphabet;
            out << YAML::Key << "rule" << YAML::Value;
            if (n.bayes)
                out << "bayes";
            else
                emit_channel(out, n.rule);
            if (n.terminal)
                out << YAML::Key << "terminal" << YAML::Value << true;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    if (c.encode) {
        out << YAML::Key << "encode" << YAML::Value << YAML::BeginMap;
        if (!c.encode->budgets.empty())
            out << YAML::Key << "budgets" << YAML::Value << YAML::Flow << c.encode->budgets;
        out << YAML::Key << "objective" << YAML::Value << c.encode->objective;
        out << YAML::Key << "greedy" << YAML::Value << c.encode->greedy;
        out << YAML::EndMap;
    }
    if (c.tax) {
        out << YAML::Key << "tax" << YAML::Value << YAML::BeginMap << YAML::Key << "channel" << YAML::Value;
        emit_channel(out, c.tax->channel);
        out << YAML::EndMap;
    }
    if (c.chain) {
        out << YAML::Key << "chain" << YAML::Value << YAML::BeginMap << YAML::Key << "hops" << YAML::Value
            << YAML::BeginSeq;
        for (const auto& h : c.chain->hops)
            emit_channel(out, h);
        out << YAML::EndSeq << YAML::EndMap;
    }
    if (c.dominance) {
        out << YAML::Key << "dominance" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "S" << YAML::Value;
        emit_channel(out, c.dominance->s);
        out << YAML::Key << "T" << YAML::Value;
        emit_channel(out, c.dominance->t);
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string config_hash(const ScenarioConfig& config)
{
    auto copy = config;
    copy.output.reset();
    const auto text = serialize_config(copy);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------- builders

Kernel ChannelSpec::build(const Space& from, const std::string& to_id, const std::vector<std::string>& to_labels) const
{
    auto out_space = [&](std::size_t n) {
        if (to_labels.empty())
            return Space::indexed(to_id, n);
        if (to_labels.size() != n)
            throw ConfigError("alphabet of '" + to_id + "' has " + std::to_string(to_labels.size()) +
                                  " symbols, channel produces " + std::to_string(n),
                              line);
        return Space(to_id, to_labels);
    };
    try {
        switch (kind) {
        case Kind::Identity:
        case Kind::Fidelity: {
            const Kernel k = kind == Kind::Identity ? Kernel::identity(from) : Kernel::symmetric(from, fidelity);
            const Space to = to_labels.empty() ? Space(to_id, from.labels()) : out_space(from.size());
            return Kernel(from, to, k.matrix());
        }
        case Kind::Matrix: {
            if (matrix.size() != from.size())
                throw ConfigError("matrix has " + std::to_string(matrix.size()) + " rows, input '" + from.id() +
                                      "' has " + std::to_string(from.size()) + " symbols",
                                  line);
            return Kernel(from, out_space(matrix.front().size()), Matrix::from_rows(matrix));
        }
        case Kind::Partition: {
            if (partition.size() != from.size())
                throw ConfigError("partition has " + std::to_string(partition.size()) + " entries, input '" +
                                      from.id() + "' has " + std::to_string(from.size()) + " symbols",
                                  line);
            const std::size_t n = *std::max_element(partition.begin(), partition.end()) + 1;
            return Kernel::deterministic(from, out_space(n), partition);
        }
        case Kind::Constant: {
            const Space to = out_space(constant.size());
            return Kernel::constant(from, Distribution(to, constant));
        }
        }
    } catch (const InputError& e) {
        throw ConfigError(e.what(), line);
    }
    throw ConfigError("unknown channel kind", line);
}

Distribution build_prior(const ScenarioConfig& config)
{
    const Space labels(kLabelName, config.model.labels);
    if (config.model.prior.empty())
        return Distribution::uniform(labels);
    return Distribution(labels, config.model.prior);
}

JointModel build_model(const ScenarioConfig& config)
{
    Space label_space;
    try {
        label_space = Space(kLabelName, config.model.labels);
    } catch (const InputError& e) {
        throw ConfigError(std::string("model.labels: ") + e.what(), config.model.line);
    }
    auto prior = build_prior(config);
    std::vector<ModelVariable> vars;
    std::vector<std::pair<std::string, Space>> known{{kLabelName, label_space}};
    auto specs = config.model.variables;
    if (specs.empty()) {
        VariableSpec b;
        b.name = "B";
        b.parents = {kLabelName};
        specs.push_back(b);
    }
    for (const auto& v : specs) {
        std::vector<Space> parent_spaces;
        for (const auto& p : v.parents) {
            auto it = std::find_if(known.begin(), known.end(), [&](const auto& kv) { return kv.first == p; });
            if (it == known.end())
                throw ConfigError("variable '" + v.name + "' has unknown or later parent '" + p + "'", v.line);
            parent_spaces.push_back(it->second);
        }
        if (parent_spaces.empty())
            throw ConfigError("variable '" + v.name + "' needs at least one parent", v.line);
        const Space in = parent_spaces.size() == 1 ? parent_spaces.front() : product_space(v.name + ".in", parent_spaces);
        Kernel k = v.kernel.build(in, v.name, v.alphabet);
        known.emplace_back(v.name, k.to());
        vars.push_back({v.name, v.parents, std::move(k)});
    }
    try {
        return JointModel(kLabelName, std::move(prior), std::move(vars));
    } catch (const InputError& e) {
        throw ConfigError(e.what(), config.model.line);
    }
}

LossMatrix build_loss(const ScenarioConfig& config)
{
    const Space labels(kLabelName, config.model.labels);
    if (!config.loss)
        return LossMatrix::zero_one(labels);
    try {
        return LossMatrix(Space("A", config.loss->actions), labels, Matrix::from_rows(config.loss->matrix));
    } catch (const InputError& e) {
        throw ConfigError(std::string("loss: ") + e.what(), config.loss->line);
    }
}

Kernel build_single_signal(const ScenarioConfig& config)
{
    const auto model = build_model(config);
    const auto& vars = model.variables();
    if (vars.size() != 1 || vars.front().parents != std::vector<std::string>{kLabelName})
        throw ConfigError("this scenario needs exactly one signal variable with parent Y", config.model.line);
    return vars.front().kernel;
}

InformationState build_state(const ScenarioConfig& config, const Limits& limits)
{
    const auto model = build_model(config);
    const auto joint = full_joint(model, limits);
    std::vector<std::string> observed;
    for (const auto& v : model.variables())
        observed.push_back(v.name);
    return InformationState::from_joint(joint, kLabelName, observed);
}

DelegatedNetwork build_network(const ScenarioConfig& config, const Limits& limits)
{
    if (!config.network || config.network->nodes.empty())
        throw ConfigError("config has no network nodes");
    auto model = build_model(config);
    const auto loss = build_loss(config);
    const auto& specs = config.network->nodes;

    std::vector<std::pair<std::string, Space>> known;
    const auto names = model.names();
    const auto spaces = model.spaces();
    for (std::size_t i = 0; i < names.size(); ++i)
        known.emplace_back(names[i], spaces[i]);
    auto lookup = [&](const std::string& name) -> const Space* {
        for (const auto& kv : known)
            if (kv.first == name)
                return &kv.second;
        return nullptr;
    };

    // resolve alphabets in dependency order; declaration order is kept
    std::vector<std::optional<Kernel>> rules(specs.size());
    bool bayes = false;
    for (std::size_t round = 0, done = 0; done < specs.size(); ++round) {
        if (round > specs.size())
            throw ConfigError("network has a cycle or reads an unknown input", specs.front().line);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const auto& n = specs[i];
            if (rules[i])
                continue;
            std::vector<Space> in;
            bool ready = true;
            for (const auto& name : n.inputs) {
                if (name == kLabelName)
                    throw ConfigError("node '" + n.id + "' may not read the label directly", n.line);
                const Space* s = lookup(name);
                if (!s) {
                    ready = false;
                    break;
                }
                in.push_back(*s);
            }
            if (!ready)
                continue;
            const Space from = in.size() == 1 ? Space(n.id + ".in", in.front().labels())
                                              : in.empty() ? Space(n.id + ".in", {"*"}) : product_space(n.id + ".in", in);
            auto labels = n.alphabet;
            if (n.terminal && labels.empty())
                labels = loss.actions().labels();
            if (n.bayes) {
                bayes = true;
                rules[i] = Kernel::constant(from, Distribution::uniform(Space(n.id, labels)));
            } else {
                rules[i] = n.rule.build(from, n.id, labels);
            }
            known.emplace_back(n.id, rules[i]->to());
            ++done;
        }
    }

    std::vector<NetworkNode> nodes;
    for (std::size_t i = 0; i < specs.size(); ++i)
        nodes.push_back({specs[i].id, specs[i].inputs, std::move(*rules[i]), specs[i].terminal});
    try {
        DelegatedNetwork net(std::move(model), std::move(nodes));
        if (net.action_space().labels() != loss.actions().labels())
            throw ConfigError("terminal alphabet must equal the loss actions", specs[net.terminal_index()].line);
        return bayes ? with_bayes_terminal(net, loss, limits) : net;
    } catch (const GraphError& e) {
        throw ConfigError(e.what(), specs.front().line);
    } catch (const InputError& e) {
        throw ConfigError(e.what(), specs.front().line);
    }
}

} // namespace delnet
