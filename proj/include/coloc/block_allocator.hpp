// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/error.hpp>
#include <coloc/host_executor.hpp>
#include <coloc/partition.hpp>
#include <coloc/topology.hpp>

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace coloc::host {

/// Tag type for memory-space dispatch in the algorithms.
struct host_memory_space
{
};

namespace detail {

/// Target binding shared by all copies and rebinds of a block allocator,
/// including the lazily created construction executor.
struct block_alloc_state
{
    std::vector<host::target> targets;
    executor_options options;
    std::once_flag executor_once;
    std::unique_ptr<block_executor> executor;

    block_executor& construction_executor()
    {
        std::call_once(executor_once, [this] {
            executor = std::make_unique<block_executor>(targets, options);
        });
        return *executor;
    }

    std::string describe() const
    {
        std::string out;
        for (auto const& t : targets)
        {
            if (!out.empty())
                out += ", ";
            out += t.description();
        }
        return out;
    }
};

}    // namespace detail

/// Allocator binding storage to an ordered list of host targets using the
/// block allocation scheme: the element range is divided evenly across
/// the targets and each block is first-touched by threads pinned to its
/// owning target during bulk construction.
template <typename T>
class block_allocator
{
public:
    using value_type = T;
    using pointer = T*;
    using const_pointer = T const*;
    using reference = T&;
    using const_reference = T const&;
    using size_type = std::size_t;
    using difference_type = std::ptrdiff_t;
    using target_type = std::vector<host::target>;
    using memory_space = host_memory_space;

    template <typename U>
    struct rebind
    {
        using other = block_allocator<U>;
    };

    explicit block_allocator(host::target t, executor_options options = {})
      : block_allocator(target_type{std::move(t)}, options)
    {
    }

    explicit block_allocator(target_type targets, executor_options options = {})
      : state_(std::make_shared<detail::block_alloc_state>())
    {
        if (targets.empty())
            throw invalid_target_error(
                "block allocator requires at least one target");
        state_->targets = std::move(targets);
        state_->options = options;
    }

    template <typename U>
    block_allocator(block_allocator<U> const& other) noexcept
      : state_(other.state_)
    {
    }

    T* allocate(size_type n)
    {
        void* p = ::operator new(
            n * sizeof(T), std::align_val_t(64), std::nothrow);
        if (p == nullptr)
            throw allocation_error(n * sizeof(T), state_->describe());
        return static_cast<T*>(p);
    }

    void deallocate(T* p, size_type) noexcept
    {
        ::operator delete(p, std::align_val_t(64));
    }

    target_type const& target() const noexcept { return state_->targets; }

    partition<host::target> partition_of(size_type n) const
    {
        return partition_block(n, state_->targets);
    }

    template <typename... Ts>
    void bulk_construct(T* p, size_type n, Ts const&... vs)
    {
        constexpr bool nothrow = std::is_nothrow_constructible_v<T, Ts const&...>;
        run_construction<nothrow>(
            p, n, [&vs...](T* at, size_type) { ::new (at) T(vs...); });
    }

    template <typename Gen>
    void bulk_generate(T* p, size_type n, Gen gen)
    {
        constexpr bool nothrow = noexcept(T(gen(size_type(0))));
        run_construction<nothrow>(
            p, n, [gen](T* at, size_type i) { ::new (at) T(gen(i)); });
    }

    void bulk_destroy(T* p, size_type n) noexcept
    {
        if constexpr (!std::is_trivially_destructible_v<T>)
        {
            for (size_type i = 0; i < n; ++i)
                p[i].~T();
        }
        (void) p;
        (void) n;
    }

    /// The executor used to co-locate construction; shared by copies and
    /// rebinds of this allocator, created on first use.
    block_executor& construction_executor() const
    {
        return state_->construction_executor();
    }

    friend bool operator==(
        block_allocator const& a, block_allocator const& b) noexcept
    {
        return a.state_->targets == b.state_->targets;
    }

private:
    template <typename>
    friend class block_allocator;

    // Construction runs through the construction executor so every block
    // is first touched from its owning target. When the element type can
    // throw during construction, a per-element ledger keeps the
    // construct/destroy balance exact.
    template <bool Nothrow, typename Ctor>
    void run_construction(T* p, size_type n, Ctor ctor)
    {
        if (n == 0)
            return;
        block_executor& exec = construction_executor();
        shape s = exec.chunked_shape(partition_of(n));

        if constexpr (Nothrow)
        {
            exec.bulk_async_execute([p, ctor](size_type i) { ctor(p + i, i); }, s)
                .get();
        }
        else
        {
            std::unique_ptr<std::atomic<unsigned char>[]> built(
                new std::atomic<unsigned char>[n]());
            auto* flags = built.get();
            try
            {
                exec.bulk_async_execute(
                        [p, ctor, flags](size_type i) {
                            ctor(p + i, i);
                            flags[i].store(1, std::memory_order_release);
                        },
                        s)
                    .get();
            }
            catch (...)
            {
                for (size_type i = 0; i < n; ++i)
                    if (flags[i].load(std::memory_order_acquire) != 0)
                        p[i].~T();
                throw;
            }
        }
    }

    std::shared_ptr<detail::block_alloc_state> state_;
};

}    // namespace coloc::host
