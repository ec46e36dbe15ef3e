// SPDX-License-Identifier: Apache-2.0

#include <coloc/executor_traits.hpp>

#include <iostream>
#include <mutex>

namespace coloc {

namespace {

std::mutex hook_mutex;

apply_error_hook& hook_slot()
{
    static apply_error_hook hook;
    return hook;
}

void log_apply_error(std::exception_ptr error) noexcept
{
    try
    {
        std::rethrow_exception(error);
    }
    catch (std::exception const& e)
    {
        std::cerr << "coloc: error in fire-and-forget task: " << e.what()
                  << std::endl;
    }
    catch (...)
    {
        std::cerr << "coloc: unknown error in fire-and-forget task"
                  << std::endl;
    }
}

}    // namespace

void set_apply_error_hook(apply_error_hook hook)
{
    std::lock_guard lock(hook_mutex);
    hook_slot() = std::move(hook);
}

namespace detail {

void report_apply_error(std::exception_ptr error) noexcept
{
    apply_error_hook hook;
    {
        std::lock_guard lock(hook_mutex);
        hook = hook_slot();
    }
    if (hook)
    {
        try
        {
            hook(error);
        }
        catch (...)
        {
        }
        return;
    }
    log_apply_error(error);
}

}    // namespace detail

}    // namespace coloc
