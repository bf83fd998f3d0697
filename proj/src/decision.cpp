#include "delnet/decision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "delnet/errors.hpp"

namespace delnet {

LossMatrix::LossMatrix(Space actions, Space labels, Matrix values)
    : actions_(std::move(actions)), labels_(std::move(labels)), values_(std::move(values))
{
    if (values_.rows() != actions_.size() || values_.cols() != labels_.size())
        throw InputError("loss matrix must be |actions| x |labels| = " + std::to_string(actions_.size()) + "x" +
                         std::to_string(labels_.size()));
    for (double v : values_.data())
        if (!std::isfinite(v) || v < 0.0)
            throw InputError("loss entries must be finite and nonnegative");
}

LossMatrix LossMatrix::zero_one(const Space& labels)
{
    Matrix m(labels.size(), labels.size(), 1.0);
    for (std::size_t i = 0; i < labels.size(); ++i)
        m(i, i) = 0.0;
    return LossMatrix(labels, labels, std::move(m));
}

double LossMatrix::max_value() const
{
    auto d = values_.data();
    return *std::max_element(d.begin(), d.end());
}

std::string_view to_string(ScoringRule rule)
{
    return rule == ScoringRule::Log ? "log" : "brier";
}

ScoringRule parse_scoring_rule(std::string_view name)
{
    if (name == "log")
        return ScoringRule::Log;
    if (name == "brier")
        return ScoringRule::Brier;
    throw InputError("unknown scoring rule '" + std::string(name) + "' (expected log or brier)");
}

// ---------------------------------------------------------------------------
// InformationState

InformationState::InformationState(std::string name, Space alphabet, Space labels, std::vector<double> weights,
                                   Matrix posteriors)
    : name_(std::move(name)), alphabet_(std::move(alphabet)), labels_(std::move(labels)),
      weights_(std::move(weights)), posteriors_(std::move(posteriors))
{
    if (weights_.size() != alphabet_.size() || posteriors_.rows() != alphabet_.size() ||
        posteriors_.cols() != labels_.size())
        throw InputError("information state '" + name_ + "': dimensions do not match its spaces");
    static_cast<void>(Distribution(alphabet_, weights_));
    for (std::size_t h = 0; h < size(); ++h)
        static_cast<void>(Distribution(labels_, {posterior(h).begin(), posterior(h).end()}));
}

InformationState InformationState::from_joint(const JointTable& joint, std::string_view label,
                                              std::span<const std::string> observed, std::string name)
{
    const std::size_t ypos = joint.position(label);
    std::vector<std::size_t> hpos;
    std::vector<Space> hspaces;
    for (const auto& v : observed) {
        hpos.push_back(joint.position(v));
        if (hpos.back() == ypos)
            throw InputError("information state cannot observe the label itself");
        hspaces.push_back(joint.spaces()[hpos.back()]);
    }
    const Space alphabet = product_space(name, hspaces);
    const Space& labels = joint.spaces()[ypos];
    Matrix mass(alphabet.size(), labels.size());
    std::vector<std::size_t> a(joint.names().size());
    for (std::size_t cell = 0; cell < joint.cells(); ++cell) {
        const double p = joint.probs()[cell];
        if (p == 0.0)
            continue;
        joint.decode(cell, a);
        std::size_t h = 0;
        for (std::size_t k = 0; k < hpos.size(); ++k)
            h = h * hspaces[k].size() + a[hpos[k]];
        mass(h, a[ypos]) += p;
    }
    const double total = std::accumulate(joint.probs().begin(), joint.probs().end(), 0.0);
    std::vector<double> label_mass(labels.size(), 0.0);
    for (std::size_t h = 0; h < mass.rows(); ++h)
        for (std::size_t y = 0; y < labels.size(); ++y)
            label_mass[y] += mass(h, y) / total;

    std::vector<double> weights(alphabet.size(), 0.0);
    Matrix post(alphabet.size(), labels.size());
    for (std::size_t h = 0; h < mass.rows(); ++h) {
        const auto row = mass.row(h);
        const double w = std::accumulate(row.begin(), row.end(), 0.0);
        weights[h] = w / total;
        for (std::size_t y = 0; y < labels.size(); ++y)
            post(h, y) = w > 0.0 ? row[y] / w : label_mass[y];
    }
    return InformationState(std::move(name), alphabet, labels, std::move(weights), std::move(post));
}

InformationState InformationState::from_experiment(const Distribution& prior, const Kernel& kernel, std::string name)
{
    if (kernel.from().size() != prior.size())
        throw InputError("experiment kernel rows must match the label space");
    const std::size_t ny = prior.size();
    const std::size_t nh = kernel.to().size();
    std::vector<double> weights(nh, 0.0);
    Matrix post(nh, ny);
    for (std::size_t h = 0; h < nh; ++h) {
        for (std::size_t y = 0; y < ny; ++y) {
            post(h, y) = prior[y] * kernel(y, h);
            weights[h] += post(h, y);
        }
        for (std::size_t y = 0; y < ny; ++y)
            post(h, y) = weights[h] > 0.0 ? post(h, y) / weights[h] : prior[y];
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& w : weights)
        w /= total;
    Space alphabet(name, kernel.to().labels());
    return InformationState(std::move(name), std::move(alphabet), prior.space(), std::move(weights), std::move(post));
}

InformationState InformationState::uninformed(const Distribution& prior, std::string name)
{
    Matrix post(1, prior.size());
    std::copy(prior.probs().begin(), prior.probs().end(), post.row(0).begin());
    return InformationState(name, Space(name, {"*"}), prior.space(), {1.0}, std::move(post));
}

Matrix InformationState::joint() const
{
    Matrix out(size(), labels_.size());
    for (std::size_t h = 0; h < size(); ++h)
        for (std::size_t y = 0; y < labels_.size(); ++y)
            out(h, y) = weights_[h] * posteriors_(h, y);
    return out;
}

Distribution InformationState::label_marginal() const
{
    std::vector<double> p(labels_.size(), 0.0);
    for (std::size_t h = 0; h < size(); ++h)
        for (std::size_t y = 0; y < labels_.size(); ++y)
            p[y] += weights_[h] * posteriors_(h, y);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p)
        x /= total;
    return Distribution(labels_, std::move(p));
}

// ---------------------------------------------------------------------------
// Bayes envelope

std::vector<double> posterior_losses(std::span<const double> posterior, const LossMatrix& loss)
{
    if (posterior.size() != loss.labels().size())
        throw InputError("posterior has " + std::to_string(posterior.size()) + " labels, loss expects " +
                         std::to_string(loss.labels().size()));
    std::vector<double> out(loss.actions().size(), 0.0);
    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t y = 0; y < posterior.size(); ++y)
            out[a] += loss(a, y) * posterior[y];
    return out;
}

BayesResult bayes_risk(const InformationState& state, const LossMatrix& loss)
{
    if (!state.labels().same_elements(loss.labels()))
        throw InputError("information state '" + state.name() + "' and loss disagree on the label space");
    BayesResult result;
    result.policy.resize(state.size());
    for (std::size_t h = 0; h < state.size(); ++h) {
        const auto lambda = posterior_losses(state.posterior(h), loss);
        const auto best = std::min_element(lambda.begin(), lambda.end());  // first minimum
        result.policy[h] = static_cast<std::size_t>(best - lambda.begin());
        result.value += state.weight(h) * *best;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Scoring rules

double score(ScoringRule rule, std::span<const double> report, std::size_t label)
{
    if (label >= report.size())
        throw InputError("score: label out of range");
    if (rule == ScoringRule::Log)
        return report[label] > 0.0 ? -std::log(report[label]) : kInfinity;
    double s = 0.0;
    for (std::size_t y = 0; y < report.size(); ++y) {
        const double d = report[y] - (y == label ? 1.0 : 0.0);
        s += d * d;
    }
    return s;
}

double scoring_value(const InformationState& state, ScoringRule rule)
{
    double value = 0.0;
    for (std::size_t h = 0; h < state.size(); ++h) {
        if (state.weight(h) == 0.0)
            continue;
        const auto pi = state.posterior(h);
        double inner = 0.0;
        for (std::size_t y = 0; y < pi.size(); ++y)
            if (pi[y] > 0.0)  // labels of zero conditional mass never realize
                inner += pi[y] * score(rule, pi, y);
        value += state.weight(h) * inner;
    }
    return value;
}

double divergence(ScoringRule rule, std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size())
        throw InputError("divergence: distributions have different lengths");
    double d = 0.0;
    if (rule == ScoringRule::Log) {
        for (std::size_t y = 0; y < p.size(); ++y) {
            if (p[y] == 0.0)
                continue;
            if (q[y] == 0.0)
                return kInfinity;
            d += p[y] * std::log(p[y] / q[y]);
        }
        return std::max(d, 0.0);
    }
    for (std::size_t y = 0; y < p.size(); ++y)
        d += (p[y] - q[y]) * (p[y] - q[y]);
    return d;
}

double divergence(ScoringRule rule, const Distribution& p, const Distribution& q)
{
    if (!p.space().same_elements(q.space()))
        throw InputError("divergence: distributions live on different spaces");
    return divergence(rule, p.probs(), q.probs());
}

double bayes_value(const InformationState& state, const Objective& objective)
{
    if (const auto* loss = std::get_if<LossMatrix>(&objective))
        return bayes_risk(state, *loss).value;
    return scoring_value(state, std::get<ScoringRule>(objective));
}

// ---------------------------------------------------------------------------
// Conditional mutual information

double conditional_mutual_information(std::span<const double> yhm, std::size_t ny, std::size_t nh, std::size_t nm)
{
    if (yhm.size() != ny * nh * nm)
        throw InputError("conditional_mutual_information: table size mismatch");
    auto at = [&](std::size_t y, std::size_t h, std::size_t m) { return yhm[(y * nh + h) * nm + m]; };
    std::vector<double> pm(nm, 0.0), pym(ny * nm, 0.0), phm(nh * nm, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t m = 0; m < nm; ++m) {
                const double p = at(y, h, m);
                pm[m] += p;
                pym[y * nm + m] += p;
                phm[h * nm + m] += p;
            }
    double cmi = 0.0;
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t m = 0; m < nm; ++m) {
                const double p = at(y, h, m);
                if (p > 0.0)
                    cmi += p * std::log(p * pm[m] / (pym[y * nm + m] * phm[h * nm + m]));
            }
    return std::max(cmi, 0.0);
}

double conditional_mutual_information(const JointTable& joint, std::string_view label,
                                      std::span<const std::string> h_vars, std::span<const std::string> m_vars)
{
    std::vector<std::string> order{std::string(label)};
    order.insert(order.end(), h_vars.begin(), h_vars.end());
    order.insert(order.end(), m_vars.begin(), m_vars.end());
    const JointTable sub = marginal(joint, order);
    std::size_t nh = 1, nm = 1;
    for (std::size_t i = 0; i < h_vars.size(); ++i)
        nh *= sub.spaces()[1 + i].size();
    for (std::size_t i = 0; i < m_vars.size(); ++i)
        nm *= sub.spaces()[1 + h_vars.size() + i].size();
    return conditional_mutual_information(sub.probs(), sub.spaces()[0].size(), nh, nm);
}

} // namespace delnet
