// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace coloc {

inline constexpr std::size_t no_block = static_cast<std::size_t>(-1);

/// Contiguous, ordered, disjoint block decomposition of [0, n) across an
/// ordered target list. Block i is owned by targets[i]; lengths differ by
/// at most one.
template <typename Target>
struct partition
{
    struct block
    {
        Target target;
        std::size_t offset = 0;
        std::size_t length = 0;

        std::size_t end() const noexcept { return offset + length; }
    };

    std::vector<block> blocks;

    std::size_t size() const noexcept { return blocks.size(); }

    std::size_t total() const noexcept
    {
        std::size_t n = 0;
        for (auto const& b : blocks)
            n += b.length;
        return n;
    }

    /// Index of the block owning element `index`; no_block when out of range.
    std::size_t block_of(std::size_t index) const noexcept
    {
        auto it = std::upper_bound(blocks.begin(), blocks.end(), index,
            [](std::size_t value, block const& b) { return value < b.end(); });
        if (it == blocks.end() || index < it->offset)
            return no_block;
        return static_cast<std::size_t>(it - blocks.begin());
    }
};

/// Splits n elements evenly over the target list: the first n mod k blocks
/// get ceil(n/k) elements, the rest floor(n/k). Zero-length blocks appear
/// when n < k. Throws std::invalid_argument on an empty target list.
template <typename Target>
partition<Target> partition_block(
    std::size_t n, std::vector<Target> const& targets)
{
    if (targets.empty())
        throw std::invalid_argument("partition_block: empty target list");

    std::size_t const k = targets.size();
    std::size_t const base = n / k;
    std::size_t const remainder = n % k;

    partition<Target> part;
    part.blocks.reserve(k);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < k; ++i)
    {
        std::size_t length = base + (i < remainder ? 1 : 0);
        part.blocks.push_back({targets[i], offset, length});
        offset += length;
    }
    return part;
}

}    // namespace coloc
