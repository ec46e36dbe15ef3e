// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <type_traits>
#include <utility>

namespace coloc::detail {

/// Move-only type-erased callable, enough to queue packaged work.
class unique_task
{
    struct base
    {
        virtual ~base() = default;
        virtual void run() = 0;
    };

    template <typename F>
    struct impl final : base
    {
        template <typename G>
        explicit impl(G&& g)
          : callable(std::forward<G>(g))
        {
        }
        void run() override { callable(); }
        F callable;
    };

public:
    unique_task() = default;

    template <typename F,
        typename = std::enable_if_t<!std::is_same_v<std::decay_t<F>, unique_task>>>
    unique_task(F&& f)
      : task_(std::make_unique<impl<std::decay_t<F>>>(std::forward<F>(f)))
    {
    }

    unique_task(unique_task&&) noexcept = default;
    unique_task& operator=(unique_task&&) noexcept = default;

    explicit operator bool() const noexcept { return task_ != nullptr; }

    void operator()() { task_->run(); }

private:
    std::unique_ptr<base> task_;
};

}    // namespace coloc::detail
