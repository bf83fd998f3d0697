#pragma once

// Selective review: automate with the Bayes act or escalate to a reviewer at
// a per-symbol review loss.

#include <optional>
#include <vector>

#include "delnet/decision.hpp"

namespace delnet {

struct ReviewProblem {
    InformationState state;
    LossMatrix loss;
    /// R_h(h) >= 0 for every information symbol.
    std::vector<double> review_loss;

    ReviewProblem(InformationState state_, LossMatrix loss_, std::vector<double> review_loss_);
    /// Same review loss c on every symbol.
    static ReviewProblem uniform_cost(InformationState state, LossMatrix loss, double cost);
};

struct AutomatedRisk {
    double risk = 0.0;
    std::size_t action = 0;
};

/// R_a(h) = min_a E[ell(a, Y) | h] and the attaining action (lowest index).
std::vector<AutomatedRisk> automated_risk(const ReviewProblem& problem);

struct ReviewDecision {
    /// Action to automate with; nullopt means escalate.
    std::optional<std::size_t> action;
    double automated_risk = 0.0;
    double review_loss = 0.0;

    bool escalate() const { return !action.has_value(); }
};

struct ReviewResult {
    std::vector<ReviewDecision> policy;
    /// E[min{R_a(H), R_h(H)}]
    double value = 0.0;
    /// P(escalate)
    double escalation_mass = 0.0;
};

/// Threshold rule: automate where R_a(h) <= R_h(h), escalate otherwise.
ReviewResult optimal_review(const ReviewProblem& problem);

struct FrontierRow {
    double cost = 0.0;
    double escalation_mass = 0.0;
    double value = 0.0;
};

/// optimal_review at R_h == c for each c in the grid, in grid order.
std::vector<FrontierRow> review_frontier(const InformationState& state, const LossMatrix& loss,
                                         const std::vector<double>& cost_grid);

} // namespace delnet
