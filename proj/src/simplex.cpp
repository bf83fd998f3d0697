#include "delnet/simplex.hpp"

#include <cmath>

#include "delnet/errors.hpp"

namespace delnet {

namespace {

constexpr double kPivotEps = 1e-12;

} // namespace

FeasibilityResult phase_one(const Matrix& a, std::span<const double> b, double tol)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m)
        throw InputError("phase_one: right-hand side has " + std::to_string(b.size()) + " entries for " +
                         std::to_string(m) + " rows");

    // Tableau [A | I | b] with rows sign-flipped so b >= 0; artificials start basic.
    const std::size_t width = n + m + 1;
    const std::size_t rhs = n + m;
    Matrix t(m, width);
    std::vector<double> sign(m, 1.0);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        sign[i] = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j)
            t(i, j) = sign[i] * a(i, j);
        t(i, n + i) = 1.0;
        t(i, rhs) = sign[i] * b[i];
        basis[i] = n + i;
    }
    // reduced costs for cost 1 on artificials, 0 elsewhere
    std::vector<double> d(width, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d[j] -= t(i, j);
    for (std::size_t i = 0; i < m; ++i)
        d[rhs] -= t(i, rhs);

    FeasibilityResult result;
    for (;;) {
        std::size_t enter = width;
        for (std::size_t j = 0; j < rhs; ++j)
            if (d[j] < -kPivotEps) {
                enter = j;
                break;
            }
        if (enter == width)
            break;

        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (t(i, enter) <= kPivotEps)
                continue;
            const double ratio = t(i, rhs) / t(i, enter);
            if (leave == m || ratio < best - kPivotEps ||
                (std::abs(ratio - best) <= kPivotEps && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        // phase 1 is bounded below by zero, so an entering column always has a pivot row
        if (leave == m)
            break;

        const double pivot = t(leave, enter);
        for (std::size_t j = 0; j < width; ++j)
            t(leave, j) /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave)
                continue;
            const double f = t(i, enter);
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j < width; ++j)
                t(i, j) -= f * t(leave, j);
        }
        const double f = d[enter];
        for (std::size_t j = 0; j < width; ++j)
            d[j] -= f * t(leave, j);
        basis[leave] = enter;
        ++result.pivots;
    }

    result.infeasibility = -d[rhs];
    result.feasible = result.infeasibility <= tol;
    if (result.feasible) {
        result.x.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n)
                result.x[basis[i]] = t(i, rhs);
    } else {
        // reduced cost of artificial i is 1 - y_i in the sign-flipped system
        result.farkas.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            result.farkas[i] = sign[i] * (1.0 - d[n + i]);
    }
    return result;
}

} // namespace delnet
