// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/detail/bulk.hpp>
#include <coloc/device.hpp>
#include <coloc/executor_traits.hpp>
#include <coloc/schedule_log.hpp>
#include <coloc/shape.hpp>

#include <cstddef>
#include <future>
#include <memory>
#include <tuple>
#include <type_traits>
#include <utility>

namespace coloc {

/// Executor bound to one mock-device queue. Work runs on the queue's
/// worker thread in FIFO order; completion settles the returned future.
/// Unlike the host executors this one implements the whole interface,
/// including the synchronous forms.
class device_executor
{
public:
    explicit device_executor(
        device::target t, std::shared_ptr<schedule_log> log = {})
      : dev_(device::system::global().find(t.device_id))
      , queue_(&dev_->queue(t.queue_id))
      , target_(t)
      , log_(log ? std::move(log) : schedule_log::global())
    {
    }

    device::target const& target() const noexcept { return target_; }
    device::mock_device& dev() const noexcept { return *dev_; }
    device::fifo_queue& queue() const noexcept { return *queue_; }

    template <typename F, typename... Ts>
    auto async_execute(F&& f, Ts&&... ts)
        -> future<std::invoke_result_t<std::decay_t<F>&, std::decay_t<Ts>&...>>
    {
        using result_type =
            std::invoke_result_t<std::decay_t<F>&, std::decay_t<Ts>&...>;
        try
        {
            return queue_->enqueue(
                [this, f = std::decay_t<F>(std::forward<F>(f)),
                    args = std::make_tuple(std::forward<Ts>(ts)...)]() mutable {
                    record(index_range{});
                    return std::apply(f, args);
                });
        }
        catch (...)
        {
            std::promise<result_type> p;
            p.set_exception(std::current_exception());
            return p.get_future();
        }
    }

    template <typename F, typename... Ts>
    auto execute(F&& f, Ts&&... ts)
    {
        return async_execute(std::forward<F>(f), std::forward<Ts>(ts)...).get();
    }

    template <typename F, typename... Ts>
    void apply_execute(F&& f, Ts&&... ts)
    {
        try
        {
            queue_->enqueue([this, f = std::decay_t<F>(std::forward<F>(f)),
                                args = std::make_tuple(
                                    std::forward<Ts>(ts)...)]() mutable {
                record(index_range{});
                try
                {
                    std::apply(f, args);
                }
                catch (...)
                {
                    detail::report_apply_error(std::current_exception());
                }
            });
        }
        catch (...)
        {
            detail::report_apply_error(std::current_exception());
        }
    }

    template <typename F, typename... Ts>
    auto bulk_async_execute(F&& f, shape const& s, Ts&&... ts) ->
        typename detail::bulk_future<detail::bulk_invoke_result_t<F, Ts...>>::type
    {
        using result_type = detail::bulk_invoke_result_t<F, Ts...>;
        auto state = std::make_shared<detail::bulk_state<result_type>>(s);
        auto func = std::make_shared<std::decay_t<F>>(std::forward<F>(f));
        auto args = std::make_shared<std::tuple<std::decay_t<Ts>...>>(
            std::forward<Ts>(ts)...);
        auto result = state->get_future();
        for (std::size_t slot = 0; slot < s.size(); ++slot)
        {
            try
            {
                queue_->enqueue([this, state, func, args, slot] {
                    record(state->ranges()[slot]);
                    state->run_range(slot, *func, *args);
                });
            }
            catch (...)
            {
                state->store_error(std::current_exception());
                state->complete_one();
            }
        }
        return result;
    }

    template <typename F, typename... Ts>
    auto bulk_execute(F&& f, shape const& s, Ts&&... ts)
    {
        using result_type = detail::bulk_invoke_result_t<F, Ts...>;
        if constexpr (std::is_void_v<result_type>)
            bulk_async_execute(std::forward<F>(f), s, std::forward<Ts>(ts)...)
                .get();
        else
            return bulk_async_execute(
                std::forward<F>(f), s, std::forward<Ts>(ts)...)
                .get();
    }

    /// Waits for every operation already enqueued on this queue.
    void drain() { queue_->wait_idle(); }

private:
    void record(index_range range)
    {
        if (log_ && log_->enabled())
            log_->record(schedule_entry{0, range.begin, range.end, range.block,
                std::this_thread::get_id(), cpu_set{}, queue_->description()});
    }

    std::shared_ptr<device::mock_device> dev_;
    device::fifo_queue* queue_;
    device::target target_;
    std::shared_ptr<schedule_log> log_;
};

}    // namespace coloc
