// SPDX-License-Identifier: Apache-2.0

#include <coloc/device.hpp>

#include <algorithm>
#include <new>

namespace coloc::device {

fifo_queue::fifo_queue(std::size_t device_id, std::size_t queue_id)
  : device_id_(device_id)
  , queue_id_(queue_id)
{
    worker_ = std::thread([this] { run(); });
}

fifo_queue::~fifo_queue()
{
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    ready_.notify_all();
    worker_.join();
}

void fifo_queue::push(detail::unique_task task)
{
    {
        std::lock_guard lock(mutex_);
        if (stop_)
            throw submission_error(description() + " is shut down");
        pending_.push_back(std::move(task));
    }
    ready_.notify_one();
}

void fifo_queue::wait_idle()
{
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [this] { return pending_.empty() && !busy_; });
}

void fifo_queue::run()
{
    std::unique_lock lock(mutex_);
    for (;;)
    {
        ready_.wait(lock, [this] { return stop_ || !pending_.empty(); });
        // Drain remaining operations even when stopping so completion
        // futures always settle.
        if (pending_.empty())
        {
            if (stop_)
                return;
            continue;
        }
        detail::unique_task task = std::move(pending_.front());
        pending_.pop_front();
        busy_ = true;
        lock.unlock();
        task();    // packaged_task: exceptions settle the future
        lock.lock();
        busy_ = false;
        if (pending_.empty())
            idle_.notify_all();
    }
}

mock_device::mock_device(std::size_t id, std::size_t capacity_bytes)
  : id_(id)
  , capacity_(capacity_bytes)
{
}

mock_device::~mock_device() = default;

std::byte* mock_device::arena_allocate(std::size_t bytes)
{
    // Capacity is an accounting limit over heap-backed storage; the arena
    // address space is only reachable through device operations.
    std::size_t previous = live_bytes_.load();
    do
    {
        if (previous + bytes > capacity_)
            throw allocation_error(bytes, description());
    } while (!live_bytes_.compare_exchange_weak(previous, previous + bytes));

    std::byte* p = static_cast<std::byte*>(
        ::operator new(bytes, std::align_val_t(64), std::nothrow));
    if (p == nullptr)
    {
        live_bytes_ -= bytes;
        throw allocation_error(bytes, description());
    }
    ++live_allocations_;
    return p;
}

void mock_device::arena_deallocate(std::byte* p, std::size_t bytes) noexcept
{
    if (p == nullptr)
        return;
    ::operator delete(p, std::align_val_t(64));
    live_bytes_ -= bytes;
    --live_allocations_;
}

std::size_t mock_device::new_queue()
{
    std::size_t qid = next_queue_.fetch_add(1);
    std::lock_guard lock(queues_mutex_);
    queues_.emplace(qid, std::make_unique<fifo_queue>(id_, qid));
    return qid;
}

fifo_queue& mock_device::queue(std::size_t queue_id)
{
    std::lock_guard lock(queues_mutex_);
    auto it = queues_.find(queue_id);
    if (it == queues_.end())
        throw invalid_target_error("device " + std::to_string(id_) +
            " has no queue " + std::to_string(queue_id));
    return *it->second;
}

system& system::global()
{
    static system instance;
    return instance;
}

void system::configure(
    std::vector<topology_config::device_decl> const& devices)
{
    std::vector<std::shared_ptr<mock_device>> next;
    next.reserve(devices.size());
    for (auto const& decl : devices)
    {
        auto already = std::find_if(next.begin(), next.end(),
            [&](auto const& d) { return d->id() == decl.id; });
        if (already != next.end())
            throw config_error(
                "device " + std::to_string(decl.id) + " declared twice");
        next.push_back(
            std::make_shared<mock_device>(decl.id, decl.capacity_bytes));
    }
    std::lock_guard lock(mutex_);
    devices_ = std::move(next);
    configured_ = true;
}

void system::ensure_default() const
{
    if (!configured_ && devices_.empty())
    {
        devices_.push_back(std::make_shared<mock_device>(0, default_capacity));
        configured_ = true;
    }
}

std::shared_ptr<mock_device> system::find(std::size_t device_id) const
{
    std::lock_guard lock(mutex_);
    ensure_default();
    for (auto const& dev : devices_)
        if (dev->id() == device_id)
            return dev;
    throw invalid_target_error(
        "device " + std::to_string(device_id) + " is not configured");
}

target system::make_target(std::size_t device_id)
{
    std::shared_ptr<mock_device> dev = find(device_id);
    return target{device_id, dev->new_queue()};
}

std::size_t system::device_count() const
{
    std::lock_guard lock(mutex_);
    ensure_default();
    return devices_.size();
}

}    // namespace coloc::device
