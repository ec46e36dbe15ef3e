// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/cpu_set.hpp>
#include <coloc/detail/unique_task.hpp>
#include <coloc/schedule_log.hpp>

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace coloc::detail {

/// Worker threads bound to one place. Each worker publishes the place's
/// cpuset as its task affinity; OS-level pinning is applied additionally
/// when the cpuset names CPUs this process can actually use (mock
/// topologies larger than the machine stay logical-only).
class pinned_pool
{
public:
    pinned_pool(cpu_set units, std::size_t worker_count, std::string place,
        std::shared_ptr<schedule_log> log);
    ~pinned_pool();

    pinned_pool(pinned_pool const&) = delete;
    pinned_pool& operator=(pinned_pool const&) = delete;

    /// Enqueues a task. Returns false when the pool is shut down.
    bool submit(unique_task task);

    /// Blocks until all submitted work has finished.
    void drain();

    /// Stops accepting work, drains what was already queued, joins.
    void shutdown();

    std::size_t worker_count() const noexcept { return workers_.size(); }
    cpu_set const& units() const noexcept { return units_; }
    std::string const& place() const noexcept { return place_; }
    schedule_log* log() const noexcept { return log_.get(); }
    bool os_pinned() const noexcept { return os_pinned_; }

private:
    void run_worker();

    cpu_set units_;
    std::string place_;
    std::shared_ptr<schedule_log> log_;
    bool os_pinned_ = false;

    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::condition_variable idle_;
    std::deque<unique_task> queue_;
    std::size_t active_ = 0;
    bool stop_ = false;
    std::vector<std::thread> workers_;
};

}    // namespace coloc::detail
