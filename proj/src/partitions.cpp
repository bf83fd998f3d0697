#include "delnet/partitions.hpp"

#include <limits>
#include <map>

namespace delnet {

std::uint64_t count_set_partitions(std::size_t n, std::size_t k)
{
    if (n == 0)
        return 1;
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    auto add = [](std::uint64_t x, std::uint64_t y) { return x > kMax - y ? kMax : x + y; };
    auto mul = [](std::uint64_t x, std::uint64_t y) { return y != 0 && x > kMax / y ? kMax : x * y; };
    // s[j] = S(i, j), Stirling numbers of the second kind for the current i
    std::vector<std::uint64_t> s(k + 1, 0);
    s[0] = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = std::min(i, k); j >= 1; --j)
            s[j] = add(mul(j, s[j]), s[j - 1]);
        s[0] = 0;
    }
    std::uint64_t total = 0;
    for (std::size_t j = 1; j <= k; ++j)
        total = add(total, s[j]);
    return total;
}

std::vector<std::size_t> canonical_partition(std::span<const std::size_t> blocks)
{
    std::map<std::size_t, std::size_t> relabel;
    std::vector<std::size_t> out;
    out.reserve(blocks.size());
    for (std::size_t b : blocks) {
        auto [it, inserted] = relabel.emplace(b, relabel.size());
        out.push_back(it->second);
    }
    return out;
}

std::string format_partition(std::span<const std::size_t> rgs, std::span<const std::string> labels)
{
    std::size_t blocks = 0;
    for (std::size_t b : rgs)
        blocks = std::max(blocks, b + 1);
    std::string out;
    for (std::size_t b = 0; b < blocks; ++b) {
        out += '{';
        bool first = true;
        for (std::size_t i = 0; i < rgs.size(); ++i) {
            if (rgs[i] != b)
                continue;
            if (!first)
                out += ' ';
            out += labels[i];
            first = false;
        }
        out += '}';
    }
    return out;
}

} // namespace delnet
