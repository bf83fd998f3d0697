#include "delnet/review.hpp"

#include <algorithm>
#include <cmath>

#include "delnet/errors.hpp"

namespace delnet {

ReviewProblem::ReviewProblem(InformationState state_, LossMatrix loss_, std::vector<double> review_loss_)
    : state(std::move(state_)), loss(std::move(loss_)), review_loss(std::move(review_loss_))
{
    if (review_loss.size() != state.size())
        throw InputError("review loss has " + std::to_string(review_loss.size()) + " entries for " +
                         std::to_string(state.size()) + " information symbols");
    for (double r : review_loss)
        if (!std::isfinite(r) || r < 0.0)
            throw InputError("review loss must be finite and nonnegative");
    if (!loss.labels().same_elements(state.labels()))
        throw InputError("loss labels do not match the state's labels");
}

ReviewProblem ReviewProblem::uniform_cost(InformationState state, LossMatrix loss, double cost)
{
    const std::size_t n = state.size();
    return ReviewProblem(std::move(state), std::move(loss), std::vector<double>(n, cost));
}

std::vector<AutomatedRisk> automated_risk(const ReviewProblem& problem)
{
    std::vector<AutomatedRisk> out(problem.state.size());
    for (std::size_t h = 0; h < out.size(); ++h) {
        const auto lambda = posterior_losses(problem.state.posterior(h), problem.loss);
        const auto best = std::min_element(lambda.begin(), lambda.end());
        out[h] = {*best, static_cast<std::size_t>(best - lambda.begin())};
    }
    return out;
}

ReviewResult optimal_review(const ReviewProblem& problem)
{
    const auto risks = automated_risk(problem);
    ReviewResult out;
    out.policy.resize(risks.size());
    for (std::size_t h = 0; h < risks.size(); ++h) {
        auto& d = out.policy[h];
        d.automated_risk = risks[h].risk;
        d.review_loss = problem.review_loss[h];
        const double w = problem.state.weight(h);
        if (risks[h].risk <= problem.review_loss[h]) {
            d.action = risks[h].action;
            out.value += w * risks[h].risk;
        } else {
            out.value += w * problem.review_loss[h];
            out.escalation_mass += w;
        }
    }
    return out;
}

std::vector<FrontierRow> review_frontier(const InformationState& state, const LossMatrix& loss,
                                         const std::vector<double>& cost_grid)
{
    if (cost_grid.empty())
        throw InputError("review frontier needs a nonempty cost grid");
    std::vector<FrontierRow> rows;
    rows.reserve(cost_grid.size());
    for (double c : cost_grid) {
        const auto r = optimal_review(ReviewProblem::uniform_cost(state, loss, c));
        rows.push_back({c, r.escalation_mass, r.value});
    }
    return rows;
}

} // namespace delnet
