#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace delnet {

/// Seeded generator with platform-independent derived draws.
///
/// std::mt19937_64 output is fully specified by the standard, but the standard
/// distributions are not, so uniform and index draws are derived here by hand.
/// Identical seeds give identical streams on every conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n), n > 0.
    std::size_t index(std::size_t n)
    {
        // rejection sampling keeps the draw exactly uniform
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    /// Integer on [lo, hi] inclusive.
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

    /// Point on the probability simplex, uniform (flat Dirichlet) via exponential spacings.
    std::vector<double> simplex(std::size_t n)
    {
        std::vector<double> v(n);
        double total = 0.0;
        for (auto& x : v) {
            x = -std::log1p(-uniform());
            total += x;
        }
        for (auto& x : v)
            x /= total;
        return v;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace delnet
