// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/device.hpp>
#include <coloc/error.hpp>

#include <cstddef>
#include <memory>
#include <type_traits>
#include <utility>

namespace coloc::device {

/// Tag type for memory-space dispatch in the algorithms. Two device
/// pointers share a space only when they live on the same device.
struct device_memory_space
{
};

/// Element-typed handle into a device arena. The raw address is only
/// meaningful inside operations running on the owning device's queues;
/// host-side code goes through staged accesses instead.
template <typename T>
class device_ptr
{
public:
    device_ptr() = default;

    device_ptr(std::shared_ptr<mock_device> dev, std::byte* base,
        std::size_t index) noexcept
      : dev_(std::move(dev))
      , base_(base)
      , index_(index)
    {
    }

    explicit operator bool() const noexcept { return base_ != nullptr; }

    /// Arena address of the element; dereference only on-device.
    T* raw() const noexcept
    {
        return reinterpret_cast<T*>(base_) + index_;
    }

    mock_device* dev() const noexcept { return dev_.get(); }
    std::shared_ptr<mock_device> const& dev_handle() const noexcept
    {
        return dev_;
    }
    std::byte* arena_base() const noexcept { return base_; }
    std::size_t index() const noexcept { return index_; }

    device_ptr operator+(std::ptrdiff_t d) const noexcept
    {
        return device_ptr(dev_, base_, index_ + static_cast<std::size_t>(d));
    }

    device_ptr& operator+=(std::ptrdiff_t d) noexcept
    {
        index_ += static_cast<std::size_t>(d);
        return *this;
    }

    friend bool operator==(device_ptr const& a, device_ptr const& b) noexcept
    {
        return a.base_ == b.base_ && a.index_ == b.index_;
    }

private:
    std::shared_ptr<mock_device> dev_;
    std::byte* base_ = nullptr;
    std::size_t index_ = 0;
};

/// Write-through element handle: reads and writes are staged as
/// operations on the owning queue, so they order with every other
/// operation submitted there.
template <typename T>
class device_proxy
{
public:
    device_proxy(device_ptr<T> p, fifo_queue* queue) noexcept
      : ptr_(std::move(p))
      , queue_(queue)
    {
    }

    operator T() const
    {
        return queue_->enqueue([p = ptr_] { return *p.raw(); }).get();
    }

    device_proxy& operator=(T const& value)
    {
        queue_->enqueue([p = ptr_, value] { *p.raw() = value; }).get();
        return *this;
    }

    device_proxy& operator=(device_proxy const& rhs)
    {
        return *this = static_cast<T>(rhs);
    }

private:
    device_ptr<T> ptr_;
    fifo_queue* queue_;
};

/// Allocator placing storage in one mock device's arena. Construction and
/// destruction are offloaded onto the target's queue, mirroring how a
/// real discrete device would run them on-device.
template <typename T>
class device_allocator
{
public:
    using value_type = T;
    using pointer = device_ptr<T>;
    using const_pointer = device_ptr<T>;
    using reference = device_proxy<T>;
    using const_reference = T;    // const reads materialize the value
    using size_type = std::size_t;
    using difference_type = std::ptrdiff_t;
    using target_type = device::target;
    using memory_space = device_memory_space;

    template <typename U>
    struct rebind
    {
        using other = device_allocator<U>;
    };

    explicit device_allocator(device::target t)
      : dev_(system::global().find(t.device_id))
      , queue_(&dev_->queue(t.queue_id))
      , target_(t)
    {
    }

    template <typename U>
    device_allocator(device_allocator<U> const& other) noexcept
      : dev_(other.dev_)
      , queue_(other.queue_)
      , target_(other.target_)
    {
    }

    pointer allocate(size_type n)
    {
        std::byte* base = dev_->arena_allocate(n * sizeof(T));
        return pointer(dev_, base, 0);
    }

    void deallocate(pointer p, size_type n) noexcept
    {
        dev_->arena_deallocate(p.arena_base(), n * sizeof(T));
    }

    target_type const& target() const noexcept { return target_; }
    fifo_queue& queue() const noexcept { return *queue_; }
    std::shared_ptr<mock_device> const& dev() const noexcept { return dev_; }

    template <typename... Ts>
    void bulk_construct(pointer p, size_type n, Ts const&... vs)
    {
        queue_->enqueue([p, n, &vs...] {
            T* raw = p.raw();
            size_type i = 0;
            try
            {
                for (; i < n; ++i)
                    ::new (raw + i) T(vs...);
            }
            catch (...)
            {
                while (i > 0)
                    raw[--i].~T();
                throw;
            }
        }).get();
        dev_->add_live_objects(n);
    }

    template <typename Gen>
    void bulk_generate(pointer p, size_type n, Gen gen)
    {
        queue_->enqueue([p, n, gen] {
            T* raw = p.raw();
            size_type i = 0;
            try
            {
                for (; i < n; ++i)
                    ::new (raw + i) T(gen(i));
            }
            catch (...)
            {
                while (i > 0)
                    raw[--i].~T();
                throw;
            }
        }).get();
        dev_->add_live_objects(n);
    }

    void bulk_destroy(pointer p, size_type n) noexcept
    {
        if constexpr (!std::is_trivially_destructible_v<T>)
        {
            queue_->enqueue([p, n] {
                T* raw = p.raw();
                for (size_type i = 0; i < n; ++i)
                    raw[i].~T();
            }).get();
        }
        dev_->remove_live_objects(n);
    }

    reference make_reference(pointer p, size_type i) const
    {
        return reference(p + static_cast<std::ptrdiff_t>(i), queue_);
    }

    const_reference make_const_reference(pointer p, size_type i) const
    {
        return queue_
            ->enqueue([at = p + static_cast<std::ptrdiff_t>(i)] {
                return *at.raw();
            })
            .get();
    }

    friend bool operator==(
        device_allocator const& a, device_allocator const& b) noexcept
    {
        return a.target_ == b.target_;
    }

private:
    template <typename>
    friend class device_allocator;

    std::shared_ptr<mock_device> dev_;
    fifo_queue* queue_;
    device::target target_;
};

}    // namespace coloc::device
