#pragma once

// Loss matrices, proper scoring rules, information states and the Bayes
// envelope. All logarithms are natural.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "delnet/matrix.hpp"
#include "delnet/prob.hpp"

namespace delnet {

/// Value of an infinite log score or an unsupported divergence.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Bounded loss ell(a, y); rows are actions, columns are labels.
class LossMatrix {
public:
    LossMatrix() = default;
    LossMatrix(Space actions, Space labels, Matrix values);

    /// 0-1 loss with actions = labels.
    static LossMatrix zero_one(const Space& labels);

    const Space& actions() const { return actions_; }
    const Space& labels() const { return labels_; }
    const Matrix& values() const { return values_; }
    double operator()(std::size_t action, std::size_t label) const { return values_(action, label); }
    double max_value() const;

private:
    Space actions_;
    Space labels_;
    Matrix values_;
};

enum class ScoringRule { Log, Brier };

std::string_view to_string(ScoringRule rule);
ScoringRule parse_scoring_rule(std::string_view name);

/// Law of an information state H: weights P(H = h) and posteriors
/// pi_h = P(Y = . | H = h). Symbols of weight zero are kept; their posterior
/// row is the label marginal.
class InformationState {
public:
    InformationState() = default;
    InformationState(std::string name, Space alphabet, Space labels, std::vector<double> weights, Matrix posteriors);

    /// State of the (tuple of) `observed` variables about `label`.
    static InformationState from_joint(const JointTable& joint, std::string_view label,
                                       std::span<const std::string> observed, std::string name = "H");
    /// State induced by observing one draw of `kernel` given Y ~ prior.
    static InformationState from_experiment(const Distribution& prior, const Kernel& kernel, std::string name = "H");
    /// Single uninformative symbol.
    static InformationState uninformed(const Distribution& prior, std::string name = "H");

    const std::string& name() const { return name_; }
    const Space& alphabet() const { return alphabet_; }
    const Space& labels() const { return labels_; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t h) const { return weights_[h]; }
    std::span<const double> posterior(std::size_t h) const { return posteriors_.row(h); }
    const Matrix& posteriors() const { return posteriors_; }
    std::size_t size() const { return weights_.size(); }

    /// Unnormalized P(H = h, Y = y), |H| x |Y|.
    Matrix joint() const;
    Distribution label_marginal() const;

private:
    std::string name_;
    Space alphabet_;
    Space labels_;
    std::vector<double> weights_;
    Matrix posteriors_;
};

struct BayesResult {
    double value = 0.0;
    /// Bayes act per information symbol, lowest action index on ties.
    std::vector<std::size_t> policy;
};

/// Posterior expected loss of every action.
std::vector<double> posterior_losses(std::span<const double> posterior, const LossMatrix& loss);

/// V(H; ell) = sum_h P(h) min_a sum_y ell(a, y) pi_h(y).
BayesResult bayes_risk(const InformationState& state, const LossMatrix& loss);

/// s(q, y). Log score is +infinity when q(y) = 0.
double score(ScoringRule rule, std::span<const double> report, std::size_t label);

/// E[s(pi_H, Y)], the Bayes value of the reporting problem. Under the log
/// rule this is the conditional entropy H(Y | H).
double scoring_value(const InformationState& state, ScoringRule rule);

/// D_s(p, q) = sum_y p(y) (s(q, y) - s(p, y)): KL(p || q) for log, ||p - q||^2
/// for Brier. Returns kInfinity if q does not dominate p under log.
double divergence(ScoringRule rule, std::span<const double> p, std::span<const double> q);
double divergence(ScoringRule rule, const Distribution& p, const Distribution& q);

/// Bayes value under either a loss matrix or a scoring rule.
using Objective = std::variant<LossMatrix, ScoringRule>;
double bayes_value(const InformationState& state, const Objective& objective);

/// I(Y; H | M) for a dense table p[y][h][m] laid out row-major.
double conditional_mutual_information(std::span<const double> yhm, std::size_t ny, std::size_t nh, std::size_t nm);

/// I(label; H | M), where H and M are tuples of variables of the table.
double conditional_mutual_information(const JointTable& joint, std::string_view label,
                                      std::span<const std::string> h_vars, std::span<const std::string> m_vars);

inline double nats_to_bits(double nats) { return nats / 0.69314718055994530942; }

} // namespace delnet
