// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <type_traits>
#include <utility>

namespace coloc {

namespace detail {

template <typename Allocator, typename = void>
struct allocator_reference
{
    using type = typename Allocator::value_type&;
};

template <typename Allocator>
struct allocator_reference<Allocator, std::void_t<typename Allocator::reference>>
{
    using type = typename Allocator::reference;
};

template <typename Allocator, typename = void>
struct allocator_const_reference
{
    using type = typename Allocator::value_type const&;
};

template <typename Allocator>
struct allocator_const_reference<Allocator,
    std::void_t<typename Allocator::const_reference>>
{
    using type = typename Allocator::const_reference;
};

}    // namespace detail

/// Extension of std::allocator_traits carrying the target binding and the
/// bulk construction interface. All extensions fall back to the plain
/// C++ allocator requirements, so any standard allocator still works:
/// only allocators that implement the members get the special behavior.
template <typename Allocator>
struct allocator_traits : std::allocator_traits<Allocator>
{
    using base_type = std::allocator_traits<Allocator>;
    using typename base_type::pointer;
    using typename base_type::size_type;
    using typename base_type::value_type;

    /// Element access handles: plain references for host memory,
    /// write-through proxies for memory that is not directly addressable.
    using reference = typename detail::allocator_reference<Allocator>::type;
    using const_reference =
        typename detail::allocator_const_reference<Allocator>::type;

    /// The place(s) this allocator binds storage to.
    using target_type = typename Allocator::target_type;

    static decltype(auto) target(Allocator const& alloc)
    {
        return alloc.target();
    }

    /// Constructs n elements from the given arguments, exactly once each.
    /// When the allocator implements bulk_construct, construction runs
    /// co-located with the storage (first-touch on host targets, on-queue
    /// for device arenas); otherwise a plain sequential loop is used.
    /// On failure every already-constructed element is destroyed.
    template <typename... Ts>
    static void bulk_construct(
        Allocator& alloc, pointer p, size_type n, Ts&&... vs)
    {
        if constexpr (requires { alloc.bulk_construct(p, n, vs...); })
        {
            alloc.bulk_construct(p, n, std::forward<Ts>(vs)...);
        }
        else
        {
            size_type i = 0;
            try
            {
                for (; i < n; ++i)
                    base_type::construct(alloc, std::addressof(p[i]), vs...);
            }
            catch (...)
            {
                while (i > 0)
                    base_type::destroy(alloc, std::addressof(p[--i]));
                throw;
            }
        }
    }

    /// Element-wise variant: element i is constructed from gen(i).
    template <typename Gen>
    static void bulk_generate(Allocator& alloc, pointer p, size_type n, Gen&& gen)
    {
        if constexpr (requires { alloc.bulk_generate(p, n, gen); })
        {
            alloc.bulk_generate(p, n, std::forward<Gen>(gen));
        }
        else
        {
            size_type i = 0;
            try
            {
                for (; i < n; ++i)
                    base_type::construct(alloc, std::addressof(p[i]), gen(i));
            }
            catch (...)
            {
                while (i > 0)
                    base_type::destroy(alloc, std::addressof(p[--i]));
                throw;
            }
        }
    }

    /// Destroys n elements, exactly once each. Must not fail.
    static void bulk_destroy(Allocator& alloc, pointer p, size_type n) noexcept
    {
        if constexpr (requires { alloc.bulk_destroy(p, n); })
        {
            alloc.bulk_destroy(p, n);
        }
        else
        {
            for (size_type i = 0; i < n; ++i)
                base_type::destroy(alloc, std::addressof(p[i]));
        }
    }

    /// Element access factory routing through the allocator when element
    /// access needs more than pointer arithmetic (device proxies).
    static reference make_reference(Allocator& alloc, pointer p, size_type i)
    {
        if constexpr (requires { alloc.make_reference(p, i); })
            return alloc.make_reference(p, i);
        else
            return p[i];
    }

    static const_reference make_const_reference(
        Allocator const& alloc, pointer p, size_type i)
    {
        if constexpr (requires { alloc.make_const_reference(p, i); })
            return alloc.make_const_reference(p, i);
        else
            return p[i];
    }
};

}    // namespace coloc
