// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/detail/unique_task.hpp>
#include <coloc/error.hpp>
#include <coloc/topology.hpp>

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <unordered_map>
#include <vector>

namespace coloc::device {

class mock_device;

/// Handle to a discrete-memory device plus one of its FIFO operation
/// queues. Operations enqueued on the same queue complete in submission
/// order.
struct target
{
    std::size_t device_id = 0;
    std::size_t queue_id = 0;

    friend bool operator==(target const&, target const&) = default;

    std::string description() const
    {
        return "device " + std::to_string(device_id) + " queue " +
            std::to_string(queue_id);
    }
};

/// In-order operation stream of a mock device, served by one worker
/// thread. Stands in for an accelerator command queue: completion of a
/// submitted operation settles the future handed back at enqueue time.
class fifo_queue
{
public:
    fifo_queue(std::size_t device_id, std::size_t queue_id);
    ~fifo_queue();

    fifo_queue(fifo_queue const&) = delete;
    fifo_queue& operator=(fifo_queue const&) = delete;

    std::size_t queue_id() const noexcept { return queue_id_; }

    std::string description() const
    {
        return "device " + std::to_string(device_id_) + " queue " +
            std::to_string(queue_id_);
    }

    template <typename F>
    auto enqueue(F&& op) -> std::future<std::invoke_result_t<std::decay_t<F>&>>
    {
        using result_type = std::invoke_result_t<std::decay_t<F>&>;
        std::packaged_task<result_type()> task(std::forward<F>(op));
        std::future<result_type> result = task.get_future();
        push(detail::unique_task(std::move(task)));
        return result;
    }

    /// Blocks until every previously submitted operation has completed.
    void wait_idle();

    /// True on the queue's worker thread; device memory may only be
    /// touched from there.
    bool on_queue_thread() const noexcept
    {
        return std::this_thread::get_id() == worker_.get_id();
    }

private:
    void push(detail::unique_task task);
    void run();

    std::size_t device_id_;
    std::size_t queue_id_;
    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::condition_variable idle_;
    std::deque<detail::unique_task> pending_;
    bool stop_ = false;
    bool busy_ = false;
    std::thread worker_;
};

/// One mock discrete-memory device: a capacity-capped allocation arena
/// with live-object accounting, plus its operation queues.
class mock_device
{
public:
    mock_device(std::size_t id, std::size_t capacity_bytes);
    ~mock_device();

    std::size_t id() const noexcept { return id_; }
    std::size_t capacity_bytes() const noexcept { return capacity_; }

    /// Allocates from the arena; throws allocation_error when the request
    /// would exceed the configured capacity.
    std::byte* arena_allocate(std::size_t bytes);
    void arena_deallocate(std::byte* p, std::size_t bytes) noexcept;

    std::size_t live_bytes() const noexcept { return live_bytes_.load(); }
    std::size_t live_allocations() const noexcept
    {
        return live_allocations_.load();
    }

    /// Constructed-object accounting used by bulk construct/destroy.
    void add_live_objects(std::size_t n) noexcept { live_objects_ += n; }
    void remove_live_objects(std::size_t n) noexcept { live_objects_ -= n; }
    std::size_t live_objects() const noexcept { return live_objects_.load(); }

    /// Creates a fresh FIFO queue and returns its id.
    std::size_t new_queue();

    fifo_queue& queue(std::size_t queue_id);

    std::string description() const
    {
        return "device " + std::to_string(id_);
    }

private:
    std::size_t id_;
    std::size_t capacity_;
    std::atomic<std::size_t> live_bytes_{0};
    std::atomic<std::size_t> live_allocations_{0};
    std::atomic<std::size_t> live_objects_{0};
    std::atomic<std::size_t> next_queue_{0};
    mutable std::mutex queues_mutex_;
    std::unordered_map<std::size_t, std::unique_ptr<fifo_queue>> queues_;
};

/// Registry of configured mock devices. Reconfiguration replaces the set;
/// allocators holding a device keep it alive through their shared handle.
class system
{
public:
    static system& global();

    void configure(std::vector<topology_config::device_decl> const& devices);

    /// The default capacity used when code asks for device 0 without any
    /// prior configuration.
    static constexpr std::size_t default_capacity = std::size_t(1) << 30;

    /// Throws invalid_target_error for unknown device ids.
    std::shared_ptr<mock_device> find(std::size_t device_id) const;

    target make_target(std::size_t device_id);

    std::size_t device_count() const;

private:
    system() = default;
    void ensure_default() const;

    mutable std::mutex mutex_;
    mutable std::vector<std::shared_ptr<mock_device>> devices_;
    mutable bool configured_ = false;
};

/// Fresh-queue target for a configured device, resolved via the global
/// registry.
inline target make_device_target(std::size_t device_id)
{
    return system::global().make_target(device_id);
}

}    // namespace coloc::device
