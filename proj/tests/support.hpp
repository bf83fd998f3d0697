#pragma once

// Shared generators and brute-force oracles for the test suites. Oracles
// avoid the library's own routines: they work from raw matrices, exact
// rationals or exhaustive enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "delnet/decision.hpp"
#include "delnet/prob.hpp"
#include "delnet/rng.hpp"

namespace testing {

using Q = boost::multiprecision::cpp_rational;
using QMatrix = std::vector<std::vector<Q>>;

inline double to_double(const Q& q) { return q.convert_to<double>(); }

inline Q ratio(long long num, long long den) { return Q(num) / Q(den); }

/// Exact value of a double (every finite double is a dyadic rational).
inline Q exact(double x) { return Q(x); }

inline QMatrix exact(const delnet::Matrix& m)
{
    QMatrix out(m.rows(), std::vector<Q>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out[i][j] = exact(m(i, j));
    return out;
}

inline QMatrix multiply(const QMatrix& a, const QMatrix& b)
{
    QMatrix out(a.size(), std::vector<Q>(b.front().size(), Q(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b.front().size(); ++j)
                out[i][j] += a[i][k] * b[k][j];
    return out;
}

// ------------------------------------------------------------- generators

inline delnet::Space space(const std::string& id, std::size_t n) { return delnet::Space::indexed(id, n); }

/// Random stochastic matrix; with `sparse`, entries are zeroed at random
/// (each row keeps at least one positive entry).
inline delnet::Matrix random_stochastic(delnet::Rng& rng, std::size_t rows, std::size_t cols, bool sparse = false)
{
    delnet::Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        auto p = rng.simplex(cols);
        if (sparse && cols > 1) {
            const std::size_t keep = rng.index(cols);
            double sum = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
                if (j != keep && rng.uniform() < 0.3)
                    p[j] = 0.0;
                sum += p[j];
            }
            for (auto& x : p)
                x /= sum;
        }
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = p[j];
    }
    return m;
}

inline delnet::Distribution random_distribution(delnet::Rng& rng, const delnet::Space& s, bool sparse = false)
{
    const auto m = random_stochastic(rng, 1, s.size(), sparse);
    return delnet::Distribution(s, std::vector<double>(m.row(0).begin(), m.row(0).end()));
}

inline delnet::Kernel random_kernel(delnet::Rng& rng, const delnet::Space& from, const delnet::Space& to,
                                    bool sparse = false)
{
    return delnet::Kernel(from, to, random_stochastic(rng, from.size(), to.size(), sparse));
}

/// Bounded loss with entries in [0, 1]; some draws are integer-valued to provoke ties.
inline delnet::LossMatrix random_loss(delnet::Rng& rng, const delnet::Space& labels, std::size_t actions)
{
    const bool coarse = rng.uniform() < 0.3;
    delnet::Matrix v(actions, labels.size());
    for (std::size_t a = 0; a < actions; ++a)
        for (std::size_t y = 0; y < labels.size(); ++y)
            v(a, y) = coarse ? static_cast<double>(rng.index(3)) / 2.0 : rng.uniform();
    return delnet::LossMatrix(space("A", actions), labels, v);
}

/// State of a random experiment about a random prior.
inline delnet::InformationState random_state(delnet::Rng& rng, std::size_t ny, std::size_t nh, bool sparse = false)
{
    const auto labels = space("Y", ny);
    const auto prior = random_distribution(rng, labels, sparse);
    return delnet::InformationState::from_experiment(prior, random_kernel(rng, labels, space("H", nh), sparse), "H");
}

// ---------------------------------------------------------------- oracles

/// Best deterministic decision rule by trying all |A|^|H| of them on the
/// joint P(h, y) = weight(h) * posterior(h, y).
inline double rule_enumeration_risk(const delnet::InformationState& s, const delnet::LossMatrix& loss)
{
    const std::size_t nh = s.size(), na = loss.actions().size(), ny = s.labels().size();
    std::vector<std::size_t> rule(nh, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        double risk = 0.0;
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t y = 0; y < ny; ++y)
                risk += s.weight(h) * s.posterior(h)[y] * loss(rule[h], y);
        best = std::min(best, risk);
        std::size_t i = 0;
        while (i < nh && ++rule[i] == na)
            rule[i++] = 0;
        if (i == nh)
            break;
    }
    return best;
}

/// I(Y; H | M) = H(Y, M) + H(H, M) - H(M) - H(Y, H, M), from a dense p[y][h][m].
inline double cmi_by_entropies(const std::vector<double>& p, std::size_t ny, std::size_t nh, std::size_t nm)
{
    auto ent = [](const std::vector<long double>& q) {
        long double e = 0.0L;
        for (auto x : q)
            if (x > 0.0L)
                e -= x * std::log(x);
        return e;
    };
    std::vector<long double> ym(ny * nm, 0.0L), hm(nh * nm, 0.0L), m(nm, 0.0L), yhm(p.begin(), p.end());
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t k = 0; k < nm; ++k) {
                const long double v = p[(y * nh + h) * nm + k];
                ym[y * nm + k] += v;
                hm[h * nm + k] += v;
                m[k] += v;
            }
    return static_cast<double>(ent(ym) + ent(hm) - ent(m) - ent(yhm));
}

/// Dense p[y][h][m] for a state H and a channel H -> M.
inline std::vector<double> yhm_table(const delnet::InformationState& s, const delnet::Kernel& channel)
{
    const std::size_t ny = s.labels().size(), nh = s.size(), nm = channel.to().size();
    std::vector<double> p(ny * nh * nm, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t m = 0; m < nm; ++m)
                p[(y * nh + h) * nm + m] = s.weight(h) * s.posterior(h)[y] * channel(h, m);
    return p;
}

/// All maps {0..n-1} -> {0..k-1}, unreduced (k^n of them).
inline void for_each_map(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f)
{
    std::vector<std::size_t> m(n, 0);
    while (true) {
        f(m);
        std::size_t i = 0;
        while (i < n && ++m[i] == k)
            m[i++] = 0;
        if (i == n)
            return;
    }
}

} // namespace testing
