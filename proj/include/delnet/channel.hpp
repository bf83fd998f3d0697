#pragma once

// Budget-constrained encoders from a shared signal B to a terminal message M,
// and the decomposition of communication loss into posterior distortion.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "delnet/decision.hpp"
#include "delnet/prob.hpp"

namespace delnet {

/// Channel from B's alphabet to a message alphabet.
struct Encoder {
    Kernel kernel;
    bool deterministic = false;

    std::size_t messages() const { return kernel.to().size(); }
};

/// Deterministic encoder sending symbol i to message rgs[i].
Encoder partition_encoder(const Space& from, std::span<const std::size_t> rgs);

/// Maximum message cardinality k (the budget log k is presentation only).
struct BudgetSpec {
    std::size_t k = 1;

    explicit BudgetSpec(std::size_t k_);
};

/// State of M when M ~ channel(. | H): P(m) = sum_h P(h) Q(m | h) and pi_m is
/// the P(h | m)-weighted mixture of the pi_h.
InformationState apply_encoder(const InformationState& state, const Kernel& channel, std::string name = "M");
inline InformationState apply_encoder(const InformationState& state, const Encoder& enc, std::string name = "M")
{
    return apply_encoder(state, enc.kernel, std::move(name));
}

struct EncoderSolution {
    Encoder encoder;
    /// Restricted growth string of the deterministic encoder.
    std::vector<std::size_t> partition;
    double value = 0.0;
    /// False for the greedy heuristic.
    bool exact = true;
    /// Search nodes expanded after pruning.
    std::uint64_t nodes = 0;
};

/// Exact minimizer of V(M; objective) over deterministic encoders with at
/// most k messages, by branch-and-bound over restricted growth strings. Ties go
/// to the first partition in canonical order. Throws EnumerationLimitError
/// when |B| exceeds limits.max_partition_symbols.
EncoderSolution optimal_encoder(const InformationState& state, BudgetSpec budget, const Objective& objective,
                                const Limits& limits = {});

/// Pairwise-merge heuristic for large alphabets: repeatedly merges the two
/// blocks whose union raises the value least. Never exact.
EncoderSolution greedy_encoder(const InformationState& state, BudgetSpec budget, const Objective& objective);

struct TaxResult {
    double value_h = 0.0;
    double value_m = 0.0;
    /// value_m - value_h
    double gap = 0.0;
    /// E[D_s(pi_H, pi_M)] evaluated pointwise over (h, m).
    double expected_divergence = 0.0;
    /// I(Y; H | M) from the (Y, H, M) joint.
    double conditional_mi = 0.0;
};

TaxResult communication_tax(const InformationState& state, const Kernel& channel, ScoringRule rule);

/// Y -> M_0 -> M_1 -> ... -> M_L.
struct ChainSpec {
    InformationState initial;
    std::vector<Kernel> hops;

    ChainSpec(InformationState initial_, std::vector<Kernel> hops_);
};

struct ChainStage {
    std::size_t stage = 0;
    /// I(Y; M_{stage-1} | M_stage)
    double term = 0.0;
    double cumulative = 0.0;
};

struct ChainResult {
    std::vector<ChainStage> stages;
    double total = 0.0;
    /// V(M_L; log) - V(M_0; log), computed from the end states only.
    double end_to_end = 0.0;
};

/// Per-hop log-loss terms of a serial chain.
ChainResult chain_decomposition(const ChainSpec& chain);

} // namespace delnet
