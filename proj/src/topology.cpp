// SPDX-License-Identifier: Apache-2.0

#include <coloc/affinity.hpp>
#include <coloc/topology.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace coloc {

namespace {

std::string trim(std::string const& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

std::vector<cpu_set> probe_sysfs_domains(cpu_set const& schedulable)
{
    namespace fs = std::filesystem;
    std::vector<std::pair<std::size_t, cpu_set>> nodes;

    std::error_code ec;
    fs::directory_iterator it("/sys/devices/system/node", ec);
    if (ec)
        return {};
    for (auto const& entry : it)
    {
        std::string name = entry.path().filename().string();
        if (name.rfind("node", 0) != 0 || name.size() <= 4)
            continue;
        if (!std::all_of(name.begin() + 4, name.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c));
            }))
            continue;

        std::ifstream in(entry.path() / "cpulist");
        std::string list;
        if (!in || !std::getline(in, list))
            continue;
        cpu_set units;
        try
        {
            units = cpu_set::parse(trim(list));
        }
        catch (config_error const&)
        {
            continue;
        }
        units = units & schedulable;
        if (!units.empty())
            nodes.emplace_back(std::stoul(name.substr(4)), units);
    }

    std::sort(nodes.begin(), nodes.end(),
        [](auto const& a, auto const& b) { return a.first < b.first; });

    std::vector<cpu_set> domains;
    domains.reserve(nodes.size());
    for (auto& [id, units] : nodes)
        domains.push_back(std::move(units));
    return domains;
}

}    // namespace

topology probe_topology()
{
    cpu_set schedulable = os_schedulable_units();
    if (schedulable.empty())
        schedulable = cpu_set::single(0);

    topology topo;
    topo.source = topology_source::probed;
    topo.numa_domains = probe_sysfs_domains(schedulable);

    // The sysfs view may miss units the scheduler grants us; anything left
    // over lands in a fallback domain so the union invariant holds.
    cpu_set covered;
    for (auto const& d : topo.numa_domains)
        covered = covered | d;
    cpu_set leftover;
    for (std::size_t pu : schedulable.to_list())
        if (!covered.test(pu))
            leftover.set(pu);
    if (!leftover.empty())
        topo.numa_domains.push_back(std::move(leftover));
    if (topo.numa_domains.empty())
        topo.numa_domains.push_back(cpu_set::single(0));
    return topo;
}

topology load_mock_topology(topology_config const& config)
{
    if (config.domains.empty())
        throw config_error("mock topology requires at least one domain");

    topology topo;
    topo.source = topology_source::mock;
    cpu_set seen;
    for (auto const& domain : config.domains)
    {
        if (domain.units.empty())
            throw config_error(
                "domain " + std::to_string(domain.id) + " is empty");
        for (std::size_t pu : domain.units.to_list())
        {
            if (seen.test(pu))
                throw config_error("unit " + std::to_string(pu) +
                    " in multiple domains (domain " +
                    std::to_string(domain.id) + ")");
            seen.set(pu);
        }
        topo.numa_domains.push_back(domain.units);
    }
    return topo;
}

topology_config parse_topology_config(std::istream& in)
{
    topology_config config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#')
            continue;

        std::istringstream ls(text);
        std::string kind;
        ls >> kind;
        std::size_t id = 0;
        ls >> id;
        std::string colon;
        ls >> colon;
        if (!ls || colon != ":")
            throw config_error("config line " + std::to_string(line_no) +
                ": expected '<domain|device> <id>: ...'");

        if (kind == "domain")
        {
            std::string rest;
            std::getline(ls, rest);
            topology_config::domain_decl d;
            d.id = id;
            d.units = cpu_set::parse(trim(rest));
            if (d.units.empty())
                throw config_error("config line " + std::to_string(line_no) +
                    ": domain " + std::to_string(id) + " lists no units");
            config.domains.push_back(std::move(d));
        }
        else if (kind == "device")
        {
            std::string keyword;
            std::size_t capacity = 0;
            ls >> keyword >> capacity;
            if (!ls || keyword != "capacity")
                throw config_error("config line " + std::to_string(line_no) +
                    ": expected 'device <id>: capacity <bytes>'");
            config.devices.push_back({id, capacity});
        }
        else
        {
            throw config_error("config line " + std::to_string(line_no) +
                ": unknown entry '" + kind + "'");
        }
    }
    return config;
}

topology_config parse_topology_config(std::string const& text)
{
    std::istringstream in(text);
    return parse_topology_config(in);
}

topology_config load_topology_config_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open topology config '" + path + "'");
    return parse_topology_config(in);
}

std::string format_topology_config(topology_config const& config)
{
    std::string out;
    for (auto const& d : config.domains)
        out += "domain " + std::to_string(d.id) + ": " + d.units.to_string() +
            "\n";
    for (auto const& dev : config.devices)
        out += "device " + std::to_string(dev.id) + ": capacity " +
            std::to_string(dev.capacity_bytes) + "\n";
    return out;
}

std::vector<host::target> get_targets(topology const& topo)
{
    std::vector<std::pair<std::size_t, std::size_t>> units;    // (pu, domain)
    for (std::size_t d = 0; d < topo.numa_domains.size(); ++d)
        for (std::size_t pu : topo.numa_domains[d].to_list())
            units.emplace_back(pu, d);
    std::sort(units.begin(), units.end());

    std::vector<host::target> out;
    out.reserve(units.size());
    for (auto const& [pu, domain] : units)
        out.emplace_back(cpu_set::single(pu), domain);
    return out;
}

std::vector<host::target> get_numa_domains(topology const& topo)
{
    std::vector<host::target> out;
    out.reserve(topo.numa_domains.size());
    for (std::size_t d = 0; d < topo.numa_domains.size(); ++d)
        out.emplace_back(topo.numa_domains[d], d);
    return out;
}

host::target restrict_target(host::target const& t, cpu_set const& units)
{
    cpu_set narrowed = t.cpuset() & units;
    if (narrowed.empty())
        throw invalid_target_error("restriction to {" + units.to_string() +
            "} leaves target {" + t.cpuset().to_string() + "} empty");
    // The result is a subset of the original cpuset, so a known NUMA node
    // still applies; a target spanning domains stays unattributed.
    return host::target(std::move(narrowed), t.numa_node());
}

}    // namespace coloc
