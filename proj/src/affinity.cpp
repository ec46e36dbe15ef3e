// SPDX-License-Identifier: Apache-2.0

#include <coloc/affinity.hpp>

#include <cctype>
#include <thread>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

namespace coloc {

cpu_set cpu_set::parse(std::string const& text)
{
    cpu_set out;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
    };
    auto parse_number = [&]() -> std::size_t {
        skip_ws();
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw config_error("bad cpulist '" + text + "': expected number");
        std::size_t value = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        {
            value = value * 10 + static_cast<std::size_t>(text[i] - '0');
            ++i;
        }
        return value;
    };

    skip_ws();
    while (i < text.size())
    {
        std::size_t lo = parse_number();
        std::size_t hi = lo;
        skip_ws();
        if (i < text.size() && text[i] == '-')
        {
            ++i;
            hi = parse_number();
            if (hi < lo)
                throw config_error("bad cpulist '" + text + "': inverted range");
        }
        for (std::size_t pu = lo; pu <= hi; ++pu)
            out.set(pu);
        skip_ws();
        if (i < text.size())
        {
            if (text[i] != ',')
                throw config_error(
                    "bad cpulist '" + text + "': unexpected character");
            ++i;
            skip_ws();
        }
    }
    return out;
}

#if defined(__linux__)

bool try_pin_current_thread(cpu_set const& units) noexcept
{
    if (units.empty())
        return false;
    ::cpu_set_t native;
    CPU_ZERO(&native);
    for (std::size_t pu : units.to_list())
    {
        if (pu >= CPU_SETSIZE)
            return false;
        CPU_SET(pu, &native);
    }
    return ::pthread_setaffinity_np(
               ::pthread_self(), sizeof(native), &native) == 0;
}

cpu_set os_thread_affinity()
{
    ::cpu_set_t native;
    CPU_ZERO(&native);
    if (::pthread_getaffinity_np(::pthread_self(), sizeof(native), &native) != 0)
        return {};
    cpu_set out;
    for (int pu = 0; pu < CPU_SETSIZE; ++pu)
        if (CPU_ISSET(pu, &native))
            out.set(static_cast<std::size_t>(pu));
    return out;
}

#else

bool try_pin_current_thread(cpu_set const&) noexcept
{
    return false;
}

cpu_set os_thread_affinity()
{
    return {};
}

#endif

cpu_set os_schedulable_units()
{
    cpu_set mask = os_thread_affinity();
    if (!mask.empty())
        return mask;
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0)
        n = 1;
    return cpu_set::range(0, n - 1);
}

namespace {

thread_local cpu_set const* current_worker_units = nullptr;

}    // namespace

namespace detail {

void set_current_worker_affinity(cpu_set const* units) noexcept
{
    current_worker_units = units;
}

}    // namespace detail

cpu_set current_task_affinity()
{
    if (current_worker_units != nullptr)
        return *current_worker_units;
    return os_thread_affinity();
}

}    // namespace coloc
