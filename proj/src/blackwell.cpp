#include "delnet/blackwell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delnet/errors.hpp"
#include "delnet/rng.hpp"
#include "delnet/simplex.hpp"

namespace delnet {

Experiment::Experiment(Distribution prior_, Kernel kernel_) : prior(std::move(prior_)), kernel(std::move(kernel_))
{
    if (kernel.from().size() != prior.size())
        throw InputError("experiment kernel has " + std::to_string(kernel.from().size()) + " rows for " +
                         std::to_string(prior.size()) + " labels");
}

Experiment experiment_from_joint(const JointTable& joint, std::string_view label, std::span<const std::string> vars)
{
    return experiment_of(InformationState::from_joint(joint, label, vars, "S"));
}

Experiment experiment_of(const InformationState& state)
{
    const Distribution prior = state.label_marginal();
    const std::size_t ny = prior.size();
    const std::size_t ns = state.size();
    const Matrix pj = state.joint();
    Matrix k(ny, ns);
    for (std::size_t y = 0; y < ny; ++y) {
        double row = 0.0;
        for (std::size_t s = 0; s < ns; ++s)
            row += pj(s, y);
        for (std::size_t s = 0; s < ns; ++s)
            k(y, s) = row > 0.0 ? pj(s, y) / row : 1.0 / static_cast<double>(ns);
    }
    return Experiment(prior, Kernel(prior.space(), state.alphabet(), std::move(k)));
}

DominanceResult is_dominated(const Experiment& s, const Experiment& t, double tol)
{
    const std::size_t ny = s.prior.size();
    if (t.prior.size() != ny)
        throw InputError("experiments describe different label spaces");
    for (std::size_t y = 0; y < ny; ++y)
        if (std::abs(s.prior[y] - t.prior[y]) > kStructuralTol)
            throw InputError("experiments must share the prior");

    DominanceResult result;
    std::vector<std::size_t> active;
    for (std::size_t y = 0; y < ny; ++y) {
        if (s.prior[y] > 0.0)
            active.push_back(y);
        else
            result.excluded_labels.push_back(y);
    }

    const std::size_t nt = t.kernel.to().size();
    const std::size_t ns = s.kernel.to().size();
    // variable G(t, s) sits at column t * ns + s
    const std::size_t rows = active.size() * ns + nt;
    Matrix a(rows, nt * ns);
    std::vector<double> b(rows, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) {
        const std::size_t y = active[k];
        for (std::size_t sv = 0; sv < ns; ++sv) {
            const std::size_t r = k * ns + sv;
            for (std::size_t tv = 0; tv < nt; ++tv)
                a(r, tv * ns + sv) = t.kernel(y, tv);
            b[r] = s.kernel(y, sv);
        }
    }
    for (std::size_t tv = 0; tv < nt; ++tv) {
        const std::size_t r = active.size() * ns + tv;
        for (std::size_t sv = 0; sv < ns; ++sv)
            a(r, tv * ns + sv) = 1.0;
        b[r] = 1.0;
    }

    const FeasibilityResult lp = phase_one(a, b, tol);
    result.infeasibility = lp.infeasibility;
    if (lp.feasible) {
        Matrix g(nt, ns);
        for (std::size_t tv = 0; tv < nt; ++tv) {
            double total = 0.0;
            for (std::size_t sv = 0; sv < ns; ++sv) {
                g(tv, sv) = std::max(lp.x[tv * ns + sv], 0.0);
                total += g(tv, sv);
            }
            for (std::size_t sv = 0; sv < ns; ++sv)
                g(tv, sv) /= total;
        }
        GarblingWitness w{Kernel(t.kernel.to(), s.kernel.to(), std::move(g)), 0.0};
        const Matrix reproduced = t.kernel.matrix() * w.channel.matrix();
        for (std::size_t y : active)
            for (std::size_t sv = 0; sv < ns; ++sv)
                w.residual = std::max(w.residual, std::abs(reproduced(y, sv) - s.kernel(y, sv)));
        if (w.residual <= tol) {
            result.witness = std::move(w);
            return result;
        }
    }
    result.label_multipliers = Matrix(ny, ns);
    result.row_multipliers.assign(nt, 0.0);
    if (!lp.farkas.empty()) {
        for (std::size_t k = 0; k < active.size(); ++k)
            for (std::size_t sv = 0; sv < ns; ++sv)
                result.label_multipliers(active[k], sv) = lp.farkas[k * ns + sv];
        for (std::size_t tv = 0; tv < nt; ++tv)
            result.row_multipliers[tv] = lp.farkas[active.size() * ns + tv];
    }
    return result;
}

namespace {

struct Verified {
    double risk_s;
    double risk_t;
};

Verified verify(const Experiment& s, const Experiment& t, const LossMatrix& loss)
{
    const auto state_s = InformationState::from_experiment(s.prior, s.kernel, "S");
    const auto state_t = InformationState::from_experiment(t.prior, t.kernel, "T");
    return {bayes_risk(state_s, loss).value, bayes_risk(state_t, loss).value};
}

LossMatrix utility_to_loss(const Space& actions, const Space& labels, const Matrix& utility)
{
    double top = 0.0;
    double scale = 0.0;
    for (double u : utility.data()) {
        top = std::max(top, u);
        scale = std::max(scale, std::abs(u));
    }
    Matrix loss(utility.rows(), utility.cols());
    for (std::size_t a = 0; a < loss.rows(); ++a)
        for (std::size_t y = 0; y < loss.cols(); ++y)
            loss(a, y) = scale > 0.0 ? (top - utility(a, y)) / scale : 0.0;
    return LossMatrix(actions, labels, std::move(loss));
}

} // namespace

SeparatingLoss separating_loss(const Experiment& s, const Experiment& t, std::uint64_t fallback_seed)
{
    const DominanceResult dom = is_dominated(s, t);
    if (dom.dominated())
        throw DominanceDetectedError("S is a garbling of T (residual " + std::to_string(dom.witness->residual) +
                                     "); no loss separates them");

    const Space& actions = s.kernel.to();
    const Space& labels = s.prior.space();
    const std::size_t ny = labels.size();
    const std::size_t ns = actions.size();

    // u(s, y) = lambda(y, s) / prior(y) on positive-prior labels; ell = C - u
    Matrix utility(ns, ny);
    for (std::size_t y = 0; y < ny; ++y) {
        if (s.prior[y] <= 0.0)
            continue;
        for (std::size_t sv = 0; sv < ns; ++sv)
            utility(sv, y) = dom.label_multipliers(y, sv) / s.prior[y];
    }
    SeparatingLoss best{utility_to_loss(actions, labels, utility), 0.0, 0.0, -kInfinity, true};
    {
        const auto v = verify(s, t, best.loss);
        best.risk_s = v.risk_s;
        best.risk_t = v.risk_t;
        best.margin = v.risk_t - v.risk_s;
    }
    if (best.margin >= kMinSeparation)
        return best;

    // fallback: randomized search over bounded losses on the same action set
    Rng rng(fallback_seed);
    for (int trial = 0; trial < 5000; ++trial) {
        Matrix values(ns, ny);
        for (std::size_t a = 0; a < ns; ++a)
            for (std::size_t y = 0; y < ny; ++y)
                values(a, y) = rng.uniform();
        LossMatrix candidate(actions, labels, std::move(values));
        const auto v = verify(s, t, candidate);
        if (v.risk_t - v.risk_s > best.margin)
            best = {std::move(candidate), v.risk_s, v.risk_t, v.risk_t - v.risk_s, false};
        if (best.margin >= kMinSeparation)
            return best;
    }
    throw std::runtime_error("no loss with separation >= 1e-7 found (best " + std::to_string(best.margin) +
                             ", phase-1 infeasibility " + std::to_string(dom.infeasibility) + ")");
}

VerificationGain verification_gain(const JointTable& joint, std::string_view label,
                                   std::span<const std::string> m_vars, std::span<const std::string> w_vars,
                                   const LossMatrix& loss, double tol)
{
    std::vector<std::string> mw(m_vars.begin(), m_vars.end());
    mw.insert(mw.end(), w_vars.begin(), w_vars.end());

    VerificationGain out;
    out.value_m = bayes_risk(InformationState::from_joint(joint, label, m_vars, "M"), loss).value;
    out.value_mw = bayes_risk(InformationState::from_joint(joint, label, mw, "MW"), loss).value;
    out.gain = out.value_m - out.value_mw;

    const Experiment with_w = experiment_from_joint(joint, label, mw);
    const Experiment without_w = experiment_from_joint(joint, label, m_vars);
    out.redundant = is_dominated(with_w, without_w, tol).dominated();
    return out;
}

} // namespace delnet
