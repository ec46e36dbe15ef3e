// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/cpu_set.hpp>
#include <coloc/partition.hpp>

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace coloc {

/// One executed work item as seen by the recording scheduler.
struct schedule_entry
{
    std::size_t sequence = 0;
    std::size_t begin = 0;            // index range covered, [begin, end)
    std::size_t end = 0;
    std::size_t block = no_block;     // owning partition block, if any
    std::thread::id thread;
    cpu_set affinity;                 // cpuset of the worker's place
    std::string place;                // e.g. "pus 0-5 (numa 0)" or "device 0 queue 1"
};

/// Thread-safe log of executed work items. Executors record into the
/// process-global instance by default; tests may supply their own. The
/// global log starts enabled when COLOC_RECORD_SCHEDULE is set to a
/// non-empty value other than "0".
class schedule_log
{
public:
    void record(schedule_entry entry)
    {
        if (!enabled_.load(std::memory_order_relaxed))
            return;
        entry.sequence = sequence_.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard lock(mutex_);
        entries_.push_back(std::move(entry));
    }

    bool enabled() const noexcept
    {
        return enabled_.load(std::memory_order_relaxed);
    }

    void set_enabled(bool on) noexcept
    {
        enabled_.store(on, std::memory_order_relaxed);
    }

    std::vector<schedule_entry> snapshot() const
    {
        std::lock_guard lock(mutex_);
        return entries_;
    }

    std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

    void clear()
    {
        std::lock_guard lock(mutex_);
        entries_.clear();
    }

    static std::shared_ptr<schedule_log> global();

private:
    mutable std::mutex mutex_;
    std::vector<schedule_entry> entries_;
    std::atomic<bool> enabled_{false};
    std::atomic<std::size_t> sequence_{0};
};

}    // namespace coloc
