// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/detail/bulk.hpp>
#include <coloc/detail/pinned_pool.hpp>
#include <coloc/error.hpp>
#include <coloc/executor_traits.hpp>
#include <coloc/partition.hpp>
#include <coloc/schedule_log.hpp>
#include <coloc/shape.hpp>
#include <coloc/topology.hpp>

#include <atomic>
#include <cstddef>
#include <future>
#include <memory>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace coloc {

/// Tuning and observability knobs shared by the host executors.
struct executor_options
{
    /// Recording scheduler sink; nullptr uses the process-global log.
    std::shared_ptr<schedule_log> log;

    /// Worker threads per target; 0 means one per processing unit.
    std::size_t workers_per_target = 0;

    /// Ranges generated per worker when an executor chunks a partition.
    std::size_t chunks_per_worker = 4;
};

/// Executor bound to one host target. Submitted work runs on worker
/// threads carrying the target's cpuset as their affinity.
class host_executor
{
public:
    explicit host_executor(host::target t, executor_options options = {})
      : target_(std::move(t))
      , options_(options)
      , pool_(target_.cpuset(), options.workers_per_target,
            target_.description(),
            options.log ? options.log : schedule_log::global())
    {
    }

    host::target const& target() const noexcept { return target_; }
    std::size_t worker_count() const noexcept { return pool_.worker_count(); }
    bool os_pinned() const noexcept { return pool_.os_pinned(); }

    template <typename F, typename... Ts>
    auto async_execute(F&& f, Ts&&... ts)
        -> future<std::invoke_result_t<std::decay_t<F>&, std::decay_t<Ts>&...>>
    {
        using result_type =
            std::invoke_result_t<std::decay_t<F>&, std::decay_t<Ts>&...>;
        std::packaged_task<result_type()> task(
            [f = std::decay_t<F>(std::forward<F>(f)),
                args = std::make_tuple(std::forward<Ts>(ts)...)]() mutable {
                return std::apply(f, args);
            });
        auto result = task.get_future();
        if (!submit_item(index_range{}, std::move(task)))
            return rejected<result_type>();
        return result;
    }

    template <typename F, typename... Ts>
    void apply_execute(F&& f, Ts&&... ts)
    {
        bool accepted = submit_item(index_range{},
            [f = std::decay_t<F>(std::forward<F>(f)),
                args = std::make_tuple(std::forward<Ts>(ts)...)]() mutable {
                try
                {
                    std::apply(f, args);
                }
                catch (...)
                {
                    detail::report_apply_error(std::current_exception());
                }
            });
        if (!accepted)
            detail::report_apply_error(std::make_exception_ptr(
                submission_error(target_.description() + " is shut down")));
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
            bool accepted = submit_item(s[slot], [state, func, args, slot] {
                state->run_range(slot, *func, *args);
            });
            if (!accepted)
            {
                state->store_error(std::make_exception_ptr(submission_error(
                    target_.description() + " is shut down")));
                state->complete_one();
            }
        }
        return result;
    }

    /// Splits a partition into chunks_per_worker ranges per worker, each
    /// tagged with its block, ready for bulk submission.
    shape chunked_shape(partition<host::target> const& part) const
    {
        shape s;
        for (std::size_t b = 0; b < part.blocks.size(); ++b)
            chunk_range(s, part.blocks[b].offset, part.blocks[b].end(),
                options_.chunks_per_worker * worker_count(), b);
        return s;
    }

    /// Waits for all submitted work to finish.
    void drain() { pool_.drain(); }

    /// Stops accepting work and drains what was queued.
    void shutdown() { pool_.shutdown(); }

private:
    template <typename R>
    future<R> rejected()
    {
        std::promise<R> p;
        p.set_exception(std::make_exception_ptr(
            submission_error(target_.description() + " is shut down")));
        return p.get_future();
    }

    template <typename Work>
    bool submit_item(index_range range, Work&& work)
    {
        if (pool_.log() != nullptr && pool_.log()->enabled())
        {
            return pool_.submit(detail::unique_task(
                [this, range, work = std::forward<Work>(work)]() mutable {
                    pool_.log()->record(schedule_entry{0, range.begin,
                        range.end, range.block, std::this_thread::get_id(),
                        pool_.units(), pool_.place()});
                    work();
                }));
        }
        return pool_.submit(detail::unique_task(std::forward<Work>(work)));
    }

    friend class block_executor;

    host::target target_;
    executor_options options_;
    detail::pinned_pool pool_;
};

/// Executor over an ordered target list, mirroring the block allocation
/// scheme: work tagged with block i dispatches to the executor of
/// targets[i], so algorithm work lands where the data block lives.
class block_executor
{
public:
    explicit block_executor(
        std::vector<host::target> targets, executor_options options = {})
      : options_(options)
    {
        if (targets.empty())
            throw invalid_target_error(
                "block executor requires at least one target");
        executors_.reserve(targets.size());
        for (auto& t : targets)
            executors_.push_back(
                std::make_unique<host_executor>(std::move(t), options));
    }

    std::size_t block_count() const noexcept { return executors_.size(); }

    host_executor& executor(std::size_t block) noexcept
    {
        return *executors_[block % executors_.size()];
    }

    std::vector<host::target> targets() const
    {
        std::vector<host::target> out;
        out.reserve(executors_.size());
        for (auto const& e : executors_)
            out.push_back(e->target());
        return out;
    }

    std::size_t worker_count() const noexcept
    {
        std::size_t n = 0;
        for (auto const& e : executors_)
            n += e->worker_count();
        return n;
    }

    template <typename F, typename... Ts>
    auto async_execute(F&& f, Ts&&... ts)
    {
        return next_executor().async_execute(
            std::forward<F>(f), std::forward<Ts>(ts)...);
    }

    template <typename F, typename... Ts>
    void apply_execute(F&& f, Ts&&... ts)
    {
        next_executor().apply_execute(
            std::forward<F>(f), std::forward<Ts>(ts)...);
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
            host_executor& ex = s[slot].block == no_block ?
                next_executor() :
                executor(s[slot].block);
            bool accepted = ex.submit_item(s[slot], [state, func, args, slot] {
                state->run_range(slot, *func, *args);
            });
            if (!accepted)
            {
                state->store_error(std::make_exception_ptr(submission_error(
                    ex.target().description() + " is shut down")));
                state->complete_one();
            }
        }
        return result;
    }

    /// Chunked shape for a partition: block i is split into
    /// chunks_per_worker ranges per worker of the executor serving it.
    shape chunked_shape(partition<host::target> const& part) const
    {
        shape s;
        for (std::size_t b = 0; b < part.blocks.size(); ++b)
        {
            std::size_t workers =
                executors_[b % executors_.size()]->worker_count();
            chunk_range(s, part.blocks[b].offset, part.blocks[b].end(),
                options_.chunks_per_worker * workers, b);
        }
        return s;
    }

    void drain()
    {
        for (auto const& e : executors_)
            e->drain();
    }

    void shutdown()
    {
        for (auto const& e : executors_)
            e->shutdown();
    }

private:
    host_executor& next_executor() noexcept
    {
        return *executors_[round_robin_.fetch_add(1, std::memory_order_relaxed) %
            executors_.size()];
    }

    executor_options options_;
    std::vector<std::unique_ptr<host_executor>> executors_;
    std::atomic<std::size_t> round_robin_{0};
};

}    // namespace coloc
