// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/cpu_set.hpp>

#include <cstddef>

namespace coloc {

/// Binds the calling thread to the given OS cpuset. Returns false when the
/// platform does not support affinity or the mask names CPUs the process
/// cannot use.
bool try_pin_current_thread(cpu_set const& units) noexcept;

/// OS-reported affinity mask of the calling thread; empty when unknown.
cpu_set os_thread_affinity();

/// CPUs this process may schedule on; falls back to hardware_concurrency.
cpu_set os_schedulable_units();

namespace detail {

/// Worker threads owned by the library publish the cpuset of their place
/// here so tasks can observe their logical binding even when the machine
/// is smaller than a mock topology and OS pinning was skipped.
void set_current_worker_affinity(cpu_set const* units) noexcept;

}    // namespace detail

/// Affinity of the place the current task runs at: the owning worker's
/// cpuset on library threads, the OS mask elsewhere.
cpu_set current_task_affinity();

}    // namespace coloc
