// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/shape.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <future>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

namespace coloc::detail {

template <typename F, typename ArgsTuple>
using bulk_result_t = decltype(std::apply(
    std::declval<F&>(), std::tuple_cat(std::declval<std::tuple<std::size_t>>(),
                            std::declval<ArgsTuple&>())));

/// Invokes f once per index of `range`, appending results (if any) to the
/// chunk storage. The loop is what executors run as one work item.
template <typename R, typename F, typename ArgsTuple>
void invoke_range(std::vector<R>& out, index_range range, F& f, ArgsTuple& args)
{
    out.reserve(range.size());
    for (std::size_t i = range.begin; i != range.end; ++i)
        out.push_back(std::apply(
            [&](auto&... unpacked) -> R { return f(i, unpacked...); }, args));
}

template <typename F, typename ArgsTuple>
void invoke_range_void(index_range range, F& f, ArgsTuple& args)
{
    for (std::size_t i = range.begin; i != range.end; ++i)
        std::apply([&](auto&... unpacked) { f(i, unpacked...); }, args);
}

/// Completion bookkeeping for one bulk submission: per-range result
/// chunks, first-error-wins cancellation, and a promise settled by the
/// last finishing work item. Results are assembled in ascending index
/// order regardless of completion order.
template <typename R>
class bulk_state
{
public:
    explicit bulk_state(shape ranges)
      : ranges_(std::move(ranges))
      , chunks_(ranges_.size())
      , remaining_(ranges_.size())
    {
        if (ranges_.empty())
            promise_.set_value({});
    }

    shape const& ranges() const noexcept { return ranges_; }

    bool cancelled() const noexcept
    {
        return cancelled_.load(std::memory_order_relaxed);
    }

    void store_error(std::exception_ptr error) noexcept
    {
        cancelled_.store(true, std::memory_order_relaxed);
        std::lock_guard lock(error_mutex_);
        if (!first_error_)
            first_error_ = std::move(error);
    }

    template <typename F, typename ArgsTuple>
    void run_range(std::size_t slot, F& f, ArgsTuple& args) noexcept
    {
        if (!cancelled())
        {
            try
            {
                invoke_range(chunks_[slot], ranges_[slot], f, args);
            }
            catch (...)
            {
                chunks_[slot].clear();
                store_error(std::current_exception());
            }
        }
        complete_one();
    }

    void complete_one() noexcept
    {
        if (remaining_.fetch_sub(1) == 1)
            settle();
    }

    std::future<std::vector<R>> get_future() { return promise_.get_future(); }

private:
    void settle() noexcept
    {
        if (first_error_)
        {
            promise_.set_exception(first_error_);
            return;
        }
        std::vector<std::size_t> order(ranges_.size());
        std::iota(order.begin(), order.end(), std::size_t(0));
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ranges_[a].begin < ranges_[b].begin;
        });
        std::vector<R> out;
        out.reserve(shape_size(ranges_));
        for (std::size_t slot : order)
            for (auto& value : chunks_[slot])
                out.push_back(std::move(value));
        promise_.set_value(std::move(out));
    }

    shape ranges_;
    std::vector<std::vector<R>> chunks_;
    std::atomic<std::size_t> remaining_;
    std::atomic<bool> cancelled_{false};
    std::mutex error_mutex_;
    std::exception_ptr first_error_;
    std::promise<std::vector<R>> promise_;
};

template <>
class bulk_state<void>
{
public:
    explicit bulk_state(shape ranges)
      : ranges_(std::move(ranges))
      , remaining_(ranges_.size())
    {
        if (ranges_.empty())
            promise_.set_value();
    }

    shape const& ranges() const noexcept { return ranges_; }

    bool cancelled() const noexcept
    {
        return cancelled_.load(std::memory_order_relaxed);
    }

    void store_error(std::exception_ptr error) noexcept
    {
        cancelled_.store(true, std::memory_order_relaxed);
        std::lock_guard lock(error_mutex_);
        if (!first_error_)
            first_error_ = std::move(error);
    }

    template <typename F, typename ArgsTuple>
    void run_range(std::size_t slot, F& f, ArgsTuple& args) noexcept
    {
        if (!cancelled())
        {
            try
            {
                invoke_range_void(ranges_[slot], f, args);
            }
            catch (...)
            {
                store_error(std::current_exception());
            }
        }
        complete_one();
    }

    void complete_one() noexcept
    {
        if (remaining_.fetch_sub(1) == 1)
            settle();
    }

    std::future<void> get_future() { return promise_.get_future(); }

private:
    void settle() noexcept
    {
        if (first_error_)
            promise_.set_exception(first_error_);
        else
            promise_.set_value();
    }

    shape ranges_;
    std::atomic<std::size_t> remaining_;
    std::atomic<bool> cancelled_{false};
    std::mutex error_mutex_;
    std::exception_ptr first_error_;
    std::promise<void> promise_;
};

}    // namespace coloc::detail
