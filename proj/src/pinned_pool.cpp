// SPDX-License-Identifier: Apache-2.0

#include <coloc/affinity.hpp>
#include <coloc/detail/pinned_pool.hpp>

#include <algorithm>

namespace coloc::detail {

pinned_pool::pinned_pool(cpu_set units, std::size_t worker_count,
    std::string place, std::shared_ptr<schedule_log> log)
  : units_(std::move(units))
  , place_(std::move(place))
  , log_(std::move(log))
{
    if (worker_count == 0)
        worker_count = std::max<std::size_t>(units_.count(), 1);
    os_pinned_ = units_.is_subset_of(os_schedulable_units());

    workers_.reserve(worker_count);
    for (std::size_t i = 0; i < worker_count; ++i)
        workers_.emplace_back([this] { run_worker(); });
}

pinned_pool::~pinned_pool()
{
    shutdown();
}

bool pinned_pool::submit(unique_task task)
{
    {
        std::lock_guard lock(mutex_);
        if (stop_)
            return false;
        queue_.push_back(std::move(task));
    }
    ready_.notify_one();
    return true;
}

void pinned_pool::drain()
{
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [this] { return queue_.empty() && active_ == 0; });
}

void pinned_pool::shutdown()
{
    {
        std::lock_guard lock(mutex_);
        if (stop_ && workers_.empty())
            return;
        stop_ = true;
    }
    ready_.notify_all();
    for (auto& worker : workers_)
        if (worker.joinable())
            worker.join();
    workers_.clear();
}

void pinned_pool::run_worker()
{
    if (os_pinned_)
        try_pin_current_thread(units_);
    set_current_worker_affinity(&units_);

    std::unique_lock lock(mutex_);
    for (;;)
    {
        ready_.wait(lock, [this] { return stop_ || !queue_.empty(); });
        if (queue_.empty())
        {
            // stop requested and queue drained
            set_current_worker_affinity(nullptr);
            return;
        }
        unique_task task = std::move(queue_.front());
        queue_.pop_front();
        ++active_;
        lock.unlock();
        task();
        lock.lock();
        --active_;
        if (queue_.empty() && active_ == 0)
            idle_.notify_all();
    }
}

}    // namespace coloc::detail
