// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/partition.hpp>

#include <cstddef>
#include <vector>

namespace coloc {

/// Half-open index range, optionally tagged with the partition block whose
/// target should run it.
struct index_range
{
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t block = no_block;

    std::size_t size() const noexcept { return end - begin; }

    friend bool operator==(index_range const&, index_range const&) = default;
};

/// A bulk execution shape: non-overlapping half-open ranges.
using shape = std::vector<index_range>;

inline std::size_t shape_size(shape const& s) noexcept
{
    std::size_t n = 0;
    for (auto const& r : s)
        n += r.size();
    return n;
}

inline shape single_range(std::size_t n, std::size_t block = no_block)
{
    if (n == 0)
        return {};
    return {index_range{0, n, block}};
}

/// Splits [begin, end) into at most `parts` even pieces, appending them to
/// `out` tagged with `block`. Keeps the ceil-first remainder rule so chunk
/// layouts are deterministic.
inline void chunk_range(shape& out, std::size_t begin, std::size_t end,
    std::size_t parts, std::size_t block = no_block)
{
    std::size_t const n = end - begin;
    if (n == 0)
        return;
    if (parts == 0)
        parts = 1;
    parts = std::min(parts, n);
    std::size_t const base = n / parts;
    std::size_t const remainder = n % parts;
    std::size_t at = begin;
    for (std::size_t i = 0; i < parts; ++i)
    {
        std::size_t len = base + (i < remainder ? 1 : 0);
        out.push_back({at, at + len, block});
        at += len;
    }
}

}    // namespace coloc
