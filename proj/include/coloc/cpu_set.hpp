// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/error.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace coloc {

/// Bitmask over machine-wide processing unit ids.
///
/// Grows on demand; processing unit 0 is bit 0. The textual form follows
/// the usual cpulist convention ("0-5,8").
class cpu_set
{
    static constexpr std::size_t bits_per_word = 64;

public:
    cpu_set() = default;

    static cpu_set single(std::size_t pu)
    {
        cpu_set s;
        s.set(pu);
        return s;
    }

    /// Units [first, last], inclusive on both ends like a cpulist.
    static cpu_set range(std::size_t first, std::size_t last)
    {
        cpu_set s;
        for (std::size_t pu = first; pu <= last; ++pu)
            s.set(pu);
        return s;
    }

    void set(std::size_t pu)
    {
        std::size_t word = pu / bits_per_word;
        if (word >= words_.size())
            words_.resize(word + 1, 0);
        words_[word] |= std::uint64_t(1) << (pu % bits_per_word);
    }

    void reset(std::size_t pu)
    {
        std::size_t word = pu / bits_per_word;
        if (word < words_.size())
            words_[word] &= ~(std::uint64_t(1) << (pu % bits_per_word));
    }

    bool test(std::size_t pu) const noexcept
    {
        std::size_t word = pu / bits_per_word;
        return word < words_.size() &&
            (words_[word] >> (pu % bits_per_word)) & 1;
    }

    std::size_t count() const noexcept
    {
        std::size_t n = 0;
        for (std::uint64_t w : words_)
            n += static_cast<std::size_t>(__builtin_popcountll(w));
        return n;
    }

    bool empty() const noexcept { return count() == 0; }

    /// Smallest set unit id; only valid when non-empty.
    std::size_t first() const
    {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w] != 0)
                return w * bits_per_word +
                    static_cast<std::size_t>(__builtin_ctzll(words_[w]));
        throw error("cpu_set::first() on empty set");
    }

    std::vector<std::size_t> to_list() const
    {
        std::vector<std::size_t> out;
        out.reserve(count());
        for (std::size_t w = 0; w < words_.size(); ++w)
        {
            std::uint64_t bits = words_[w];
            while (bits != 0)
            {
                std::size_t b =
                    static_cast<std::size_t>(__builtin_ctzll(bits));
                out.push_back(w * bits_per_word + b);
                bits &= bits - 1;
            }
        }
        return out;
    }

    cpu_set operator&(cpu_set const& rhs) const
    {
        cpu_set out;
        std::size_t n = std::min(words_.size(), rhs.words_.size());
        out.words_.resize(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            out.words_[i] = words_[i] & rhs.words_[i];
        out.trim();
        return out;
    }

    cpu_set operator|(cpu_set const& rhs) const
    {
        cpu_set out;
        std::size_t n = std::max(words_.size(), rhs.words_.size());
        out.words_.resize(n, 0);
        for (std::size_t i = 0; i < words_.size(); ++i)
            out.words_[i] |= words_[i];
        for (std::size_t i = 0; i < rhs.words_.size(); ++i)
            out.words_[i] |= rhs.words_[i];
        return out;
    }

    bool intersects(cpu_set const& rhs) const noexcept
    {
        std::size_t n = std::min(words_.size(), rhs.words_.size());
        for (std::size_t i = 0; i < n; ++i)
            if (words_[i] & rhs.words_[i])
                return true;
        return false;
    }

    bool is_subset_of(cpu_set const& rhs) const noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
        {
            std::uint64_t other = i < rhs.words_.size() ? rhs.words_[i] : 0;
            if (words_[i] & ~other)
                return false;
        }
        return true;
    }

    friend bool operator==(cpu_set const& a, cpu_set const& b) noexcept
    {
        std::size_t n = std::max(a.words_.size(), b.words_.size());
        for (std::size_t i = 0; i < n; ++i)
        {
            std::uint64_t wa = i < a.words_.size() ? a.words_[i] : 0;
            std::uint64_t wb = i < b.words_.size() ? b.words_[i] : 0;
            if (wa != wb)
                return false;
        }
        return true;
    }

    /// cpulist form, e.g. "0-5,8"; "" for the empty set.
    std::string to_string() const
    {
        std::string out;
        auto pus = to_list();
        std::size_t i = 0;
        while (i < pus.size())
        {
            std::size_t j = i;
            while (j + 1 < pus.size() && pus[j + 1] == pus[j] + 1)
                ++j;
            if (!out.empty())
                out += ',';
            out += std::to_string(pus[i]);
            if (j > i + 1)
                out += '-' + std::to_string(pus[j]);
            else if (j == i + 1)
                out += ',' + std::to_string(pus[j]);
            i = j + 1;
        }
        return out;
    }

    /// Parses a cpulist ("0-5,8", "3", "0,1,2"). Whitespace around commas
    /// is accepted. Throws config_error on malformed input.
    static cpu_set parse(std::string const& text);

private:
    void trim()
    {
        while (!words_.empty() && words_.back() == 0)
            words_.pop_back();
    }

    std::vector<std::uint64_t> words_;
};

}    // namespace coloc
