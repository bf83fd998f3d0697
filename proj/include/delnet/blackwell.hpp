#pragma once

// Comparison of experiments: garbling feasibility, separating losses built
// from infeasibility certificates, and the value of an extra terminal signal.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delnet/decision.hpp"
#include "delnet/prob.hpp"

namespace delnet {

/// A signal about Y: prior over Y and a kernel Y -> signal alphabet.
struct Experiment {
    Distribution prior;
    Kernel kernel;

    Experiment(Distribution prior, Kernel kernel);
};

/// Experiment whose observation has the law of `state`: K(y, h) = P(h | y).
/// Rows for labels of zero probability are uniform placeholders.
Experiment experiment_of(const InformationState& state);

/// Experiment of the (tuple of) `vars` about `label` in a joint table.
/// Rows for labels of zero probability are uniform placeholders.
Experiment experiment_from_joint(const JointTable& joint, std::string_view label, std::span<const std::string> vars);

/// Channel G with K_S ~= K_T * G on the positive-prior rows.
struct GarblingWitness {
    Kernel channel;
    /// max |K_S - K_T G| over positive-prior rows.
    double residual = 0.0;
};

struct DominanceResult {
    std::optional<GarblingWitness> witness;
    /// Farkas multipliers when no witness exists. label_multipliers(y, s)
    /// pairs with the constraint (K_T G)(y, s) = K_S(y, s); row_multipliers(t)
    /// with sum_s G(t, s) = 1.
    Matrix label_multipliers;
    std::vector<double> row_multipliers;
    /// Zero-prior labels left out of the equality constraints.
    std::vector<std::size_t> excluded_labels;
    /// Phase-1 optimum (0 when dominated).
    double infeasibility = 0.0;

    bool dominated() const { return witness.has_value(); }
};

/// Is S a garbling of T (T Blackwell-dominates S)?
DominanceResult is_dominated(const Experiment& s, const Experiment& t, double tol = 1e-9);

struct SeparatingLoss {
    /// Actions are S's signal symbols.
    LossMatrix loss;
    double risk_s = 0.0;
    double risk_t = 0.0;
    /// risk_t - risk_s, recomputed through the Bayes envelope.
    double margin = 0.0;
    /// True when the certificate construction succeeded; false when the
    /// randomized fallback produced the loss.
    bool from_certificate = true;
};

/// Smallest margin accepted as a strict separation.
inline constexpr double kMinSeparation = 1e-7;

/// Bounded loss under which S beats T strictly. Throws DominanceDetectedError
/// when S turns out to be dominated by T, std::runtime_error when no verified
/// loss is found.
SeparatingLoss separating_loss(const Experiment& s, const Experiment& t, std::uint64_t fallback_seed = 0x5eed);

struct VerificationGain {
    double value_m = 0.0;
    double value_mw = 0.0;
    double gain = 0.0;
    /// (M, W) is a garbling of M: the extra signal is redundant for Y.
    bool redundant = false;
};

/// Value of observing W in addition to M at the terminal stage.
VerificationGain verification_gain(const JointTable& joint, std::string_view label,
                                   std::span<const std::string> m_vars, std::span<const std::string> w_vars,
                                   const LossMatrix& loss, double tol = 1e-9);

} // namespace delnet
