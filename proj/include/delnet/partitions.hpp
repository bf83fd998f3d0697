#pragma once

// Set partitions as restricted growth strings: a[0] = 0 and
// a[i] <= 1 + max(a[0..i-1]). Each partition of {0..n-1} has exactly one
// such string, so enumerating strings never revisits a relabeled partition.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace delnet {

/// Calls visit(std::span<const std::size_t> rgs, std::size_t blocks) for every
/// partition of n items into at most max_blocks blocks, in lexicographic order
/// of the strings. n = 0 yields nothing.
template <typename Visit>
void for_each_set_partition(std::size_t n, std::size_t max_blocks, Visit&& visit)
{
    if (n == 0 || max_blocks == 0)
        return;
    std::vector<std::size_t> a(n, 0);
    // prefix_max[i] = max(a[0..i])
    std::vector<std::size_t> prefix_max(n, 0);
    for (;;) {
        visit(std::span<const std::size_t>(a), prefix_max[n - 1] + 1);
        std::size_t i = n;
        while (i-- > 1) {
            if (a[i] <= prefix_max[i - 1] && a[i] + 1 < max_blocks)
                break;
        }
        if (i == 0 || i >= n)
            return;
        ++a[i];
        prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            a[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

/// Number of partitions of n items into at most k blocks (sum of Stirling
/// numbers of the second kind). Saturates at UINT64_MAX.
std::uint64_t count_set_partitions(std::size_t n, std::size_t k);

inline std::uint64_t bell_number(std::size_t n) { return count_set_partitions(n, n); }

/// Relabel an arbitrary block assignment into its restricted growth string.
std::vector<std::size_t> canonical_partition(std::span<const std::size_t> blocks);

/// "{a b}{c}" using the given item labels.
std::string format_partition(std::span<const std::size_t> rgs, std::span<const std::string> labels);

} // namespace delnet
