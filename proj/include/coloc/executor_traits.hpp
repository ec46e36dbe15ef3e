// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/detail/bulk.hpp>
#include <coloc/shape.hpp>

#include <exception>
#include <functional>
#include <future>
#include <memory>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace coloc {

template <typename T>
using future = std::future<T>;

/// Handler invoked for exceptions escaping fire-and-forget tasks. The
/// default logs to stderr; an empty function restores the default.
using apply_error_hook = std::function<void(std::exception_ptr)>;

void set_apply_error_hook(apply_error_hook hook);

namespace detail {

void report_apply_error(std::exception_ptr error) noexcept;

template <typename Executor, typename F, typename... Ts>
concept has_async_execute = requires(Executor& exec, F&& f, Ts&&... ts) {
    exec.async_execute(std::forward<F>(f), std::forward<Ts>(ts)...);
};

template <typename Executor, typename F, typename... Ts>
concept has_execute = requires(Executor& exec, F&& f, Ts&&... ts) {
    exec.execute(std::forward<F>(f), std::forward<Ts>(ts)...);
};

template <typename Executor, typename F, typename... Ts>
concept has_apply_execute = requires(Executor& exec, F&& f, Ts&&... ts) {
    exec.apply_execute(std::forward<F>(f), std::forward<Ts>(ts)...);
};

template <typename Executor, typename F, typename... Ts>
concept has_bulk_async_execute =
    requires(Executor& exec, F&& f, shape const& s, Ts&&... ts) {
        exec.bulk_async_execute(
            std::forward<F>(f), s, std::forward<Ts>(ts)...);
    };

template <typename Executor, typename F, typename... Ts>
concept has_bulk_execute =
    requires(Executor& exec, F&& f, shape const& s, Ts&&... ts) {
        exec.bulk_execute(std::forward<F>(f), s, std::forward<Ts>(ts)...);
    };

template <typename F, typename... Ts>
using bulk_invoke_result_t =
    std::invoke_result_t<std::decay_t<F>&, std::size_t, std::decay_t<Ts>&...>;

template <typename R>
struct bulk_future
{
    using type = future<std::vector<R>>;
};

template <>
struct bulk_future<void>
{
    using type = future<void>;
};

}    // namespace detail

/// Uniform executor access in the style of std::allocator_traits: an
/// executor only has to provide async_execute, every other form is
/// derived here when the executor does not implement it itself.
template <typename Executor>
struct executor_traits
{
    using executor_type = Executor;

    template <typename T>
    struct future
    {
        using type = coloc::future<T>;
    };

    template <typename F, typename... Ts>
    static auto async_execute(Executor& exec, F&& f, Ts&&... ts)
    {
        static_assert(detail::has_async_execute<Executor, F, Ts...>,
            "an executor must implement async_execute");
        return exec.async_execute(std::forward<F>(f), std::forward<Ts>(ts)...);
    }

    template <typename F, typename... Ts>
    static decltype(auto) execute(Executor& exec, F&& f, Ts&&... ts)
    {
        if constexpr (detail::has_execute<Executor, F, Ts...>)
        {
            return exec.execute(std::forward<F>(f), std::forward<Ts>(ts)...);
        }
        else
        {
            return async_execute(exec, std::forward<F>(f), std::forward<Ts>(ts)...)
                .get();
        }
    }

    template <typename F, typename... Ts>
    static void apply_execute(Executor& exec, F&& f, Ts&&... ts)
    {
        if constexpr (detail::has_apply_execute<Executor, F, Ts...>)
        {
            exec.apply_execute(std::forward<F>(f), std::forward<Ts>(ts)...);
        }
        else
        {
            // Fire and forget: errors cannot propagate, so they are routed
            // to the pluggable hook. The returned future is discarded.
            auto wrapped = [f = std::decay_t<F>(std::forward<F>(f)),
                               args = std::make_tuple(
                                   std::forward<Ts>(ts)...)]() mutable {
                try
                {
                    std::apply(f, args);
                }
                catch (...)
                {
                    detail::report_apply_error(std::current_exception());
                }
            };
            (void) exec.async_execute(std::move(wrapped));
        }
    }

    template <typename F, typename... Ts>
    static auto bulk_async_execute(
        Executor& exec, F&& f, shape const& s, Ts&&... ts) ->
        typename detail::bulk_future<detail::bulk_invoke_result_t<F, Ts...>>::type
    {
        if constexpr (detail::has_bulk_async_execute<Executor, F, Ts...>)
        {
            return exec.bulk_async_execute(
                std::forward<F>(f), s, std::forward<Ts>(ts)...);
        }
        else
        {
            return bulk_via_async(
                exec, std::forward<F>(f), s, std::forward<Ts>(ts)...);
        }
    }

    template <typename F, typename... Ts>
    static auto bulk_execute(Executor& exec, F&& f, shape const& s, Ts&&... ts)
    {
        if constexpr (detail::has_bulk_execute<Executor, F, Ts...>)
        {
            return exec.bulk_execute(
                std::forward<F>(f), s, std::forward<Ts>(ts)...);
        }
        else
        {
            using result_type = detail::bulk_invoke_result_t<F, Ts...>;
            if constexpr (std::is_void_v<result_type>)
                bulk_async_execute(
                    exec, std::forward<F>(f), s, std::forward<Ts>(ts)...)
                    .get();
            else
                return bulk_async_execute(
                    exec, std::forward<F>(f), s, std::forward<Ts>(ts)...)
                    .get();
        }
    }

private:
    // Derivation of bulk submission from plain async_execute: one task per
    // range plus a final aggregation task. The aggregation task is
    // submitted last, so in-order executors cannot reach it before the
    // range tasks have finished.
    template <typename F, typename... Ts>
    static auto bulk_via_async(Executor& exec, F&& f, shape const& s, Ts&&... ts)
    {
        using result_type = detail::bulk_invoke_result_t<F, Ts...>;

        auto state = std::make_shared<detail::bulk_state<result_type>>(s);
        auto func = std::make_shared<std::decay_t<F>>(std::forward<F>(f));
        auto args = std::make_shared<std::tuple<std::decay_t<Ts>...>>(
            std::forward<Ts>(ts)...);

        // Range futures are parked here so executors whose futures block in
        // their destructor do not serialize the submission loop.
        auto pending = std::make_shared<
            std::vector<decltype(exec.async_execute([] {}))>>();
        pending->reserve(s.size());
        for (std::size_t slot = 0; slot < s.size(); ++slot)
        {
            try
            {
                pending->push_back(
                    exec.async_execute([state, func, args, slot] {
                        state->run_range(slot, *func, *args);
                    }));
            }
            catch (...)
            {
                state->store_error(std::current_exception());
                state->complete_one();
            }
        }

        return exec.async_execute([state, args, pending] {
            for (auto& pended : *pending)
            {
                try
                {
                    pended.get();
                }
                catch (...)
                {
                    // A rejected submission means the range task never ran;
                    // account for it like a failed range.
                    state->store_error(std::current_exception());
                    state->complete_one();
                }
            }
            auto combined = state->get_future();
            // Every range has completed or been accounted for by now, so
            // the combined future is ready.
            if constexpr (std::is_void_v<result_type>)
                combined.get();
            else
                return combined.get();
        });
    }
};

}    // namespace coloc
