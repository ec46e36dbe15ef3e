// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/block_allocator.hpp>
#include <coloc/device_allocator.hpp>
#include <coloc/device_executor.hpp>
#include <coloc/executor_traits.hpp>
#include <coloc/host_executor.hpp>
#include <coloc/shape.hpp>
#include <coloc/vector.hpp>

#include <algorithm>
#include <cstddef>
#include <cstring>
#include <iterator>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace coloc {

// ---------------------------------------------------------------------
// Execution policies
// ---------------------------------------------------------------------

template <typename Executor>
struct parallel_executor_policy;
template <typename Executor>
struct sequenced_executor_policy;

/// Sequential execution on the calling thread.
struct sequenced_policy
{
    template <typename Executor>
    sequenced_executor_policy<Executor> on(Executor& exec) const noexcept
    {
        return {&exec};
    }
};

/// Parallel execution; without .on() an executor is built from the
/// destination's targets.
struct parallel_policy
{
    template <typename Executor>
    parallel_executor_policy<Executor> on(Executor& exec) const noexcept
    {
        return {&exec};
    }
};

/// Parallel execution dispatching all work through the bound executor.
template <typename Executor>
struct parallel_executor_policy
{
    Executor* exec;

    template <typename Executor2>
    parallel_executor_policy<Executor2> on(Executor2& next) const noexcept
    {
        return {&next};
    }

    Executor& executor() const noexcept { return *exec; }
};

/// Sequential execution that still routes each chunk through the bound
/// executor, so placement is honored without concurrency.
template <typename Executor>
struct sequenced_executor_policy
{
    Executor* exec;

    template <typename Executor2>
    sequenced_executor_policy<Executor2> on(Executor2& next) const noexcept
    {
        return {&next};
    }

    Executor& executor() const noexcept { return *exec; }
};

inline constexpr sequenced_policy seq{};
inline constexpr parallel_policy par{};

namespace detail {

template <typename Policy>
struct policy_info
{
    static constexpr bool has_executor = false;
    static constexpr bool sequenced = std::is_same_v<Policy, sequenced_policy>;
    using executor_type = void;
};

template <typename E>
struct policy_info<parallel_executor_policy<E>>
{
    static constexpr bool has_executor = true;
    static constexpr bool sequenced = false;
    using executor_type = E;
};

template <typename E>
struct policy_info<sequenced_executor_policy<E>>
{
    static constexpr bool has_executor = true;
    static constexpr bool sequenced = true;
    using executor_type = E;
};

// ---------------------------------------------------------------------
// Iterator classification
// ---------------------------------------------------------------------

template <typename A, typename = void>
struct alloc_space
{
    using type = host::host_memory_space;
};

template <typename A>
struct alloc_space<A, std::void_t<typename A::memory_space>>
{
    using type = typename A::memory_space;
};

template <typename It>
struct iter_info
{
    static constexpr bool is_coloc = false;
    static constexpr bool host_contiguous = std::is_pointer_v<It>;
    static constexpr bool device = false;
};

template <typename V>
struct iter_info<vector_iterator<V>>
{
    using vector_type = std::remove_const_t<V>;
    using allocator_type = typename vector_type::allocator_type;
    using space = typename alloc_space<allocator_type>::type;
    static constexpr bool is_coloc = true;
    static constexpr bool host_contiguous =
        std::is_same_v<space, host::host_memory_space>;
    static constexpr bool device =
        std::is_same_v<space, device::device_memory_space>;
};

template <typename It>
auto host_base(It it)
{
    if constexpr (std::is_pointer_v<It>)
        return it;
    else
        return it.container()->data_handle() +
            static_cast<std::ptrdiff_t>(it.position());
}

template <typename It>
auto device_base(It it)
{
    return it.container()->data_handle() +
        static_cast<std::ptrdiff_t>(it.position());
}

template <typename It>
device::fifo_queue& queue_of(It it)
{
    return it.container()->allocator().queue();
}

inline bool memory_overlaps(
    void const* a, void const* b, std::size_t bytes) noexcept
{
    auto pa = reinterpret_cast<std::uintptr_t>(a);
    auto pb = reinterpret_cast<std::uintptr_t>(b);
    return pa < pb + bytes && pb < pa + bytes;
}

// ---------------------------------------------------------------------
// Work shape construction and policy-driven execution
// ---------------------------------------------------------------------

template <typename Exec>
std::size_t workers_for_block(Exec& exec, std::size_t block)
{
    if constexpr (requires { exec.executor(block).worker_count(); })
        return exec.executor(block).worker_count();
    else if constexpr (requires { exec.worker_count(); })
        return exec.worker_count();
    else
        return 1;
}

template <typename Exec>
std::size_t total_workers(Exec& exec)
{
    if constexpr (requires { exec.worker_count(); })
        return exec.worker_count();
    else
        return 1;
}

inline constexpr std::size_t default_chunks_per_worker = 4;

/// Ranges covering [0, n) of the algorithm's index space, tagged with the
/// destination's owning blocks and subdivided for load balance.
template <typename Exec, typename OutIt>
shape algorithm_shape(Exec& exec, OutIt d_first, std::size_t n)
{
    shape s;
    if constexpr (iter_info<OutIt>::is_coloc)
    {
        auto const& part = d_first.container()->distribution();
        std::size_t const d0 = d_first.position();
        for (std::size_t b = 0; b < part.blocks.size(); ++b)
        {
            auto const& blk = part.blocks[b];
            std::size_t lo = std::max(blk.offset, d0);
            std::size_t hi = std::min(blk.end(), d0 + n);
            if (lo < hi)
                chunk_range(s, lo - d0, hi - d0,
                    default_chunks_per_worker * workers_for_block(exec, b), b);
        }
    }
    else
    {
        chunk_range(
            s, 0, n, default_chunks_per_worker * total_workers(exec), no_block);
    }
    return s;
}

template <typename Exec, typename F>
void execute_shape(Exec& exec, shape const& s, F&& f, bool sequenced)
{
    using traits = executor_traits<std::decay_t<Exec>>;
    if (!sequenced)
    {
        traits::bulk_execute(exec, std::forward<F>(f), s);
        return;
    }
    shape ordered = s;
    std::sort(ordered.begin(), ordered.end(),
        [](index_range const& a, index_range const& b) {
            return a.begin < b.begin;
        });
    for (auto const& r : ordered)
        traits::bulk_execute(exec, f, shape{r});
}

/// Runs fn(exec) with an executor derived from the destination: the
/// owning targets for a coloc vector, all schedulable units for plain
/// host ranges, the bound queue for device vectors.
template <typename OutIt, typename Fn>
void with_default_executor(OutIt d_first, Fn&& fn)
{
    if constexpr (iter_info<OutIt>::device)
    {
        device_executor exec(d_first.container()->allocator().target());
        fn(exec);
    }
    else if constexpr (iter_info<OutIt>::is_coloc)
    {
        auto const& part = d_first.container()->distribution();
        std::vector<host::target> targets;
        targets.reserve(part.blocks.size());
        for (auto const& blk : part.blocks)
            targets.push_back(blk.target);
        block_executor exec(std::move(targets));
        fn(exec);
    }
    else
    {
        host_executor exec(host::target(os_schedulable_units()));
        fn(exec);
    }
}

/// f(i) exactly once for every i in [0, n), scheduled per policy.
template <typename Policy, typename OutIt, typename F>
void run_indexed(Policy const& policy, OutIt d_first, std::size_t n, F&& f)
{
    using info = policy_info<Policy>;
    if constexpr (!info::has_executor && info::sequenced)
    {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
    }
    else if constexpr (info::has_executor)
    {
        auto& exec = policy.executor();
        execute_shape(exec, algorithm_shape(exec, d_first, n),
            std::forward<F>(f), info::sequenced);
    }
    else
    {
        with_default_executor(d_first, [&](auto& exec) {
            execute_shape(exec, algorithm_shape(exec, d_first, n),
                std::forward<F>(f), false);
        });
    }
}

/// g(range) exactly once per generated range; used by the byte-copy fast
/// path where the work item is per-range rather than per-index.
template <typename Policy, typename OutIt, typename G>
void run_ranged(Policy const& policy, OutIt d_first, std::size_t n, G&& g)
{
    using info = policy_info<Policy>;
    if constexpr (!info::has_executor && info::sequenced)
    {
        g(index_range{0, n, no_block});
        return;
    }
    else
    {
        auto submit = [&](auto& exec) {
            shape element_shape = algorithm_shape(exec, d_first, n);
            shape meta;
            meta.reserve(element_shape.size());
            for (std::size_t k = 0; k < element_shape.size(); ++k)
                meta.push_back({k, k + 1, element_shape[k].block});
            execute_shape(
                exec,
                meta,
                [&element_shape, &g](std::size_t k) { g(element_shape[k]); },
                info::sequenced);
        };
        if constexpr (info::has_executor)
            submit(policy.executor());
        else
            with_default_executor(d_first, submit);
    }
}

/// Device data may be touched raw only when the work actually runs on a
/// device queue: either the policy carries a device executor or the
/// default executor derived from the device destination is used. Plain
/// `seq` stays on the calling thread and must go through staged access.
template <typename Policy>
inline constexpr bool device_raw_allowed =
    (policy_info<Policy>::has_executor &&
        std::is_same_v<typename policy_info<Policy>::executor_type,
            device_executor>) ||
    (!policy_info<Policy>::has_executor && !policy_info<Policy>::sequenced);

}    // namespace detail

// ---------------------------------------------------------------------
// copy
// ---------------------------------------------------------------------

/// Copies [first, last) to [d_first, d_first + n). Same-space contiguous
/// ranges take a bulk byte-copy fast path; host/device crossings are
/// staged as one transfer per queue; everything else is elementwise.
template <typename Policy, typename InIt, typename OutIt>
OutIt copy(Policy const& policy, InIt first, InIt last, OutIt d_first)
{
    using in_info = detail::iter_info<InIt>;
    using out_info = detail::iter_info<OutIt>;
    using value_type = typename std::iterator_traits<InIt>::value_type;
    static_assert(std::is_same_v<value_type,
                      typename std::iterator_traits<OutIt>::value_type>,
        "coloc::copy requires identical element types");

    std::size_t const n = static_cast<std::size_t>(last - first);
    if (n == 0)
        return d_first;

    constexpr bool bytewise = std::is_trivially_copyable_v<value_type>;

    if constexpr (in_info::host_contiguous && out_info::host_contiguous &&
        bytewise)
    {
        value_type const* src = detail::host_base(first);
        value_type* dst = detail::host_base(d_first);
#if !defined(NDEBUG)
        if (detail::memory_overlaps(src, dst, n * sizeof(value_type)))
            throw std::invalid_argument("coloc::copy: overlapping ranges");
#endif
        detail::run_ranged(policy, d_first, n, [src, dst](index_range r) {
            std::memcpy(dst + r.begin, src + r.begin, r.size() * sizeof(value_type));
        });
    }
    else if constexpr (in_info::host_contiguous && out_info::device && bytewise)
    {
        value_type const* src = detail::host_base(first);
        auto dst = detail::device_base(d_first);
        detail::queue_of(d_first)
            .enqueue([src, dst, n] {
                std::memcpy(dst.raw(), src, n * sizeof(value_type));
            })
            .get();
    }
    else if constexpr (in_info::device && out_info::host_contiguous && bytewise)
    {
        auto src = detail::device_base(first);
        value_type* dst = detail::host_base(d_first);
        detail::queue_of(first)
            .enqueue([src, dst, n] {
                std::memcpy(dst, src.raw(), n * sizeof(value_type));
            })
            .get();
    }
    else if constexpr (in_info::device && out_info::device && bytewise)
    {
        auto src = detail::device_base(first);
        auto dst = detail::device_base(d_first);
        if (src.dev() == dst.dev())
        {
            detail::queue_of(d_first)
                .enqueue([src, dst, n] {
                    std::memmove(dst.raw(), src.raw(), n * sizeof(value_type));
                })
                .get();
        }
        else
        {
            // Cross-device: stage through a host bounce buffer, one
            // transfer per queue.
            std::vector<value_type> bounce(n);
            value_type* hp = bounce.data();
            detail::queue_of(first)
                .enqueue([src, hp, n] {
                    std::memcpy(hp, src.raw(), n * sizeof(value_type));
                })
                .get();
            detail::queue_of(d_first)
                .enqueue([dst, hp, n] {
                    std::memcpy(dst.raw(), hp, n * sizeof(value_type));
                })
                .get();
        }
    }
    else
    {
        detail::run_indexed(policy, d_first, n,
            [first, d_first](std::size_t i) { d_first[i] = first[i]; });
    }
    return d_first + static_cast<std::ptrdiff_t>(n);
}

// ---------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------

/// dst[i] = f(src[i]); work for each destination block runs on the
/// block's target.
template <typename Policy, typename InIt, typename OutIt, typename F>
OutIt transform(Policy const& policy, InIt first, InIt last, OutIt d_first, F f)
{
    using in_info = detail::iter_info<InIt>;
    using out_info = detail::iter_info<OutIt>;

    std::size_t const n = static_cast<std::size_t>(last - first);
    if (n == 0)
        return d_first;

    if constexpr (in_info::host_contiguous && out_info::host_contiguous)
    {
        auto const* src = detail::host_base(first);
        auto* dst = detail::host_base(d_first);
        detail::run_indexed(policy, d_first, n,
            [src, dst, f](std::size_t i) { dst[i] = f(src[i]); });
    }
    else if constexpr (in_info::device && out_info::device &&
        detail::device_raw_allowed<Policy>)
    {
        auto src = detail::device_base(first);
        auto dst = detail::device_base(d_first);
        detail::run_indexed(policy, d_first, n,
            [src, dst, f](std::size_t i) { dst.raw()[i] = f(src.raw()[i]); });
    }
    else
    {
        detail::run_indexed(policy, d_first, n,
            [first, d_first, f](std::size_t i) { d_first[i] = f(first[i]); });
    }
    return d_first + static_cast<std::ptrdiff_t>(n);
}

/// dst[i] = f(src1[i], src2[i]).
template <typename Policy, typename InIt1, typename InIt2, typename OutIt,
    typename F>
OutIt transform(Policy const& policy, InIt1 first1, InIt1 last1, InIt2 first2,
    OutIt d_first, F f)
{
    using in1_info = detail::iter_info<InIt1>;
    using in2_info = detail::iter_info<InIt2>;
    using out_info = detail::iter_info<OutIt>;

    std::size_t const n = static_cast<std::size_t>(last1 - first1);
    if (n == 0)
        return d_first;

    if constexpr (in1_info::host_contiguous && in2_info::host_contiguous &&
        out_info::host_contiguous)
    {
        auto const* src1 = detail::host_base(first1);
        auto const* src2 = detail::host_base(first2);
        auto* dst = detail::host_base(d_first);
        detail::run_indexed(policy, d_first, n,
            [src1, src2, dst, f](std::size_t i) { dst[i] = f(src1[i], src2[i]); });
    }
    else if constexpr (in1_info::device && in2_info::device &&
        out_info::device && detail::device_raw_allowed<Policy>)
    {
        auto src1 = detail::device_base(first1);
        auto src2 = detail::device_base(first2);
        auto dst = detail::device_base(d_first);
        detail::run_indexed(policy, d_first, n, [src1, src2, dst, f](std::size_t i) {
            dst.raw()[i] = f(src1.raw()[i], src2.raw()[i]);
        });
    }
    else
    {
        detail::run_indexed(policy, d_first, n,
            [first1, first2, d_first, f](std::size_t i) {
                d_first[i] = f(first1[i], first2[i]);
            });
    }
    return d_first + static_cast<std::ptrdiff_t>(n);
}

}    // namespace coloc
