// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/cpu_set.hpp>
#include <coloc/error.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coloc {

namespace host {

/// Handle to a place made of processing units with a common memory
/// affinity. Equality compares the cpuset only.
class target
{
public:
    target() = default;

    explicit target(cpu_set units, std::optional<std::size_t> numa_node = {})
      : units_(std::move(units))
      , numa_node_(numa_node)
    {
        if (units_.empty())
            throw invalid_target_error("host target requires a non-empty cpuset");
    }

    cpu_set const& cpuset() const noexcept { return units_; }

    /// Set when the cpuset lies within a single NUMA domain.
    std::optional<std::size_t> numa_node() const noexcept { return numa_node_; }

    std::size_t unit_count() const noexcept { return units_.count(); }

    friend bool operator==(target const& a, target const& b) noexcept
    {
        return a.units_ == b.units_;
    }

    std::string description() const
    {
        std::string out = "pus " + units_.to_string();
        if (numa_node_)
            out += " (numa " + std::to_string(*numa_node_) + ")";
        return out;
    }

private:
    cpu_set units_;
    std::optional<std::size_t> numa_node_;
};

}    // namespace host

enum class topology_source
{
    probed,
    mock
};

/// Processing units of one machine grouped into pairwise disjoint NUMA
/// domains whose union covers every unit. Immutable once built.
struct topology
{
    std::vector<cpu_set> numa_domains;
    topology_source source = topology_source::probed;

    std::size_t total_processing_units() const noexcept
    {
        std::size_t n = 0;
        for (auto const& d : numa_domains)
            n += d.count();
        return n;
    }

    cpu_set all_units() const
    {
        cpu_set all;
        for (auto const& d : numa_domains)
            all = all | d;
        return all;
    }

    std::optional<std::size_t> domain_of(std::size_t pu) const noexcept
    {
        for (std::size_t d = 0; d < numa_domains.size(); ++d)
            if (numa_domains[d].test(pu))
                return d;
        return std::nullopt;
    }
};

/// Declarative machine description used for deterministic testing and for
/// configuring mock discrete-memory devices. See parse_topology_config for
/// the file format.
struct topology_config
{
    struct domain_decl
    {
        std::size_t id = 0;
        cpu_set units;
    };

    struct device_decl
    {
        std::size_t id = 0;
        std::size_t capacity_bytes = 0;
    };

    std::vector<domain_decl> domains;
    std::vector<device_decl> devices;
};

/// Discovers the machine topology. Uses the Linux sysfs NUMA enumeration
/// restricted to the CPUs this process may schedule on; degrades to a
/// single domain over all schedulable units when node information is
/// unavailable. Never fails.
topology probe_topology();

/// Builds a mock topology mirroring the config. Throws config_error when a
/// domain is empty or a unit appears in more than one domain.
topology load_mock_topology(topology_config const& config);

/// Parses the line-oriented config format:
///
///   # comment
///   domain 0: 0-5
///   domain 1: 6,7,8-11
///   device 0: capacity 1048576
///
/// Unit lists use cpulist syntax. Exactly this format is emitted by
/// format_topology_config, so configs round-trip.
topology_config parse_topology_config(std::istream& in);
topology_config parse_topology_config(std::string const& text);
topology_config load_topology_config_file(std::string const& path);

std::string format_topology_config(topology_config const& config);

/// One singleton target per processing unit, ordered by unit id.
std::vector<host::target> get_targets(topology const& topo);

/// One target per NUMA domain carrying the domain's full cpuset.
std::vector<host::target> get_numa_domains(topology const& topo);

/// Narrows a target to the given units. The NUMA node is kept when the
/// result still lies inside the original target's domain. Throws
/// invalid_target_error when the intersection is empty.
host::target restrict_target(host::target const& t, cpu_set const& units);

}    // namespace coloc
