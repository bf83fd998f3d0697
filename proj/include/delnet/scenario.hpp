#pragma once

// Config-driven scenario runners. Every number in a result table is computed
// exactly; accuracies are 1 minus a Bayes or network risk under the
// configured loss (0-1 unless declared).

#include <optional>
#include <span>
#include <string>

#include "delnet/config.hpp"
#include "delnet/prob.hpp"
#include "delnet/result_table.hpp"

namespace delnet {

inline constexpr const char* kToolVersion = "delnet 1.0.0";

struct RunOptions {
    /// Report information quantities (KL, mutual information, log values) in bits.
    bool bits = false;
    Limits limits;
};

ResultTable run_relay_depth(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_interface(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_distortion_scatter(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_signal_expansion(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_review_frontier(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_custom_network(const ScenarioConfig& config, const RunOptions& options = {});

/// Dispatch on config.scenario (ConfigError when absent).
ResultTable run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// Single-purpose subcommands.
ResultTable run_encode(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_tax(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_chain(const ScenarioConfig& config, const RunOptions& options = {});
ResultTable run_dominance(const ScenarioConfig& config, const RunOptions& options = {});

/// Sample Pearson correlation; nullopt when either sample is constant (spread
/// at most 1e-12).
/// Throws InputError for fewer than 3 points or unequal lengths.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

} // namespace delnet
