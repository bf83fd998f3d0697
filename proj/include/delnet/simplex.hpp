#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "delnet/matrix.hpp"

namespace delnet {

/// Outcome of a phase-1 search for x >= 0 with A x = b.
struct FeasibilityResult {
    bool feasible = false;
    /// A feasible point when `feasible`.
    std::vector<double> x;
    /// Farkas certificate y when infeasible: y^T A <= 0 componentwise and
    /// y^T b > 0.
    std::vector<double> farkas;
    /// Optimal phase-1 objective: total artificial mass left in the basis.
    double infeasibility = 0.0;
    std::size_t pivots = 0;
};

/// Dense phase-1 simplex with Bland's anti-cycling rule. The system counts as
/// feasible when the phase-1 optimum is at most `tol`.
FeasibilityResult phase_one(const Matrix& a, std::span<const double> b, double tol = 1e-9);

} // namespace delnet
