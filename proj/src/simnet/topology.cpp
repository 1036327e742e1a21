/*
 * Copyright 2026 The sdnchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "sdnchain/simnet/topology.hpp"

#include "sdnchain/core/error.hpp"

#include <algorithm>
#include <deque>

namespace sdnchain::simnet {

void TopologySpec::validate() const
{
    std::set<std::string> names;
    std::set<DatapathId> dpids;
    for (const auto& s : switches) {
        if (!dpids.insert(s.dpid).second)
            throw Error(Errc::DuplicateDatapathId, "duplicate datapath id on " + s.name);
        if (!names.insert(s.name).second)
            throw Error(Errc::InvalidArgument, "duplicate switch name " + s.name);
    }
    if (switches.empty())
        throw Error(Errc::InvalidArgument, "topology has no switches");
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& l : links) {
        if (!names.count(l.a) || !names.count(l.b) || l.a == l.b)
            throw Error(Errc::InvalidArgument, "bad link " + l.a + "-" + l.b);
        if (!adj[l.a].insert(l.b).second)
            throw Error(Errc::InvalidArgument, "parallel link " + l.a + "-" + l.b);
        adj[l.b].insert(l.a);
    }
    std::set<std::string> seen{switches.front().name};
    std::deque<std::string> q{switches.front().name};
    while (!q.empty()) {
        auto cur = q.front();
        q.pop_front();
        for (const auto& n : adj[cur])
            if (seen.insert(n).second)
                q.push_back(n);
    }
    if (seen.size() != switches.size())
        throw Error(Errc::InvalidArgument, "topology is not connected");
    std::set<std::uint64_t> macs;
    std::set<std::uint32_t> ips;
    std::set<std::string> host_names;
    for (const auto& h : hosts) {
        if (!names.count(h.attached_to))
            throw Error(Errc::InvalidArgument, "host " + h.name + " attached to unknown switch");
        if (!macs.insert(h.mac.value).second || !ips.insert(h.ip.value).second || !host_names.insert(h.name).second)
            throw Error(Errc::InvalidArgument, "duplicate host address " + h.name);
    }
}

TopologySpec default_topology()
{
    return named_topology("default6");
}

namespace {

TopologySpec shaped(std::string name, std::size_t n_switches, const std::vector<std::pair<int, int>>& edges,
                    std::size_t hosts)
{
    TopologySpec t;
    t.name = std::move(name);
    for (std::size_t i = 1; i <= n_switches; ++i)
        t.switches.push_back({"s" + std::to_string(i), static_cast<DatapathId>(i)});
    for (auto [a, b] : edges)
        t.links.push_back({"s" + std::to_string(a), "s" + std::to_string(b), 1000});
    for (std::size_t i = 1; i <= hosts; ++i)
        t.hosts.push_back({"h" + std::to_string(i), MacAddr{static_cast<std::uint64_t>(i)},
                           Ipv4Addr{0x0a000000u + static_cast<std::uint32_t>(i)},
                           "s" + std::to_string((i - 1) % n_switches + 1)});
    return t;
}

} // namespace

std::vector<std::string> named_topologies()
{
    return {"default6", "line6", "ring6", "star6", "mesh6", "tree7", "grid6"};
}

TopologySpec named_topology(std::string_view name, std::size_t hosts)
{
    if (hosts > 4000)
        throw Error(Errc::InvalidArgument, "too many hosts");
    std::vector<std::pair<int, int>> e;
    if (name == "default6" || name == "default") {
        return shaped("default6", 6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 1}, {1, 4}}, hosts);
    }
    if (name == "line6")
        return shaped("line6", 6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}}, hosts);
    if (name == "ring6")
        return shaped("ring6", 6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 1}}, hosts);
    if (name == "star6")
        return shaped("star6", 6, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}}, hosts);
    if (name == "mesh6") {
        for (int a = 1; a <= 6; ++a)
            for (int b = a + 1; b <= 6; ++b)
                e.emplace_back(a, b);
        return shaped("mesh6", 6, e, hosts);
    }
    if (name == "tree7")
        return shaped("tree7", 7, {{1, 2}, {1, 3}, {2, 4}, {2, 5}, {3, 6}, {3, 7}}, hosts);
    if (name == "grid6")
        return shaped("grid6", 6, {{1, 2}, {2, 3}, {4, 5}, {5, 6}, {1, 4}, {2, 5}, {3, 6}}, hosts);
    throw Error(Errc::InvalidArgument, "unknown topology " + std::string(name));
}

TopologySpec topology_from_json(const nlohmann::json& j)
{
    try {
        TopologySpec t;
        t.name = j.value("name", "unnamed");
        for (const auto& s : j.at("switches"))
            t.switches.push_back({s.at("name").get<std::string>(), s.at("dpid").get<DatapathId>()});
        for (const auto& l : j.at("links"))
            t.links.push_back({l.at("a").get<std::string>(), l.at("b").get<std::string>(), l.value("capacity_mbps", 1000.0)});
        for (const auto& h : j.value("hosts", nlohmann::json::array()))
            t.hosts.push_back({h.at("name").get<std::string>(), MacAddr::parse(h.at("mac").get<std::string>()),
                               Ipv4Addr::parse(h.at("ip").get<std::string>()), h.at("switch").get<std::string>()});
        t.validate();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("topology document: ") + e.what());
    }
}

nlohmann::json to_json(const TopologySpec& t)
{
    nlohmann::ordered_json j;
    j["name"] = t.name;
    j["switches"] = nlohmann::json::array();
    for (const auto& s : t.switches)
        j["switches"].push_back({{"name", s.name}, {"dpid", s.dpid}});
    j["links"] = nlohmann::json::array();
    for (const auto& l : t.links)
        j["links"].push_back({{"a", l.a}, {"b", l.b}, {"capacity_mbps", l.capacity_mbps}});
    j["hosts"] = nlohmann::json::array();
    for (const auto& h : t.hosts)
        j["hosts"].push_back({{"name", h.name}, {"mac", h.mac.str()}, {"ip", h.ip.str()}, {"switch", h.attached_to}});
    return j;
}

Topology::Topology(TopologySpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    ports_.resize(spec_.switches.size());
    for (std::size_t i = 0; i < spec_.switches.size(); ++i)
        by_dpid_[spec_.switches[i].dpid] = i;
    for (const auto& l : spec_.links) {
        std::size_t a = *switch_by_name(l.a), b = *switch_by_name(l.b);
        auto pa = static_cast<std::uint32_t>(ports_[a].size() + 1);
        auto pb = static_cast<std::uint32_t>(ports_[b].size() + 1);
        std::string id = l.a + "-" + l.b;
        ports_[a].push_back({pa, PortKind::SwitchLink, b, pb, id});
        ports_[b].push_back({pb, PortKind::SwitchLink, a, pa, id});
    }
    for (std::size_t h = 0; h < spec_.hosts.size(); ++h) {
        std::size_t sw = *switch_by_name(spec_.hosts[h].attached_to);
        auto p = static_cast<std::uint32_t>(ports_[sw].size() + 1);
        ports_[sw].push_back({p, PortKind::Host, h, 0, spec_.switches[sw].name + "-" + spec_.hosts[h].name});
        host_switch_.push_back(sw);
        host_port_.push_back(p);
    }
}

std::optional<std::size_t> Topology::switch_index(DatapathId dpid) const
{
    auto it = by_dpid_.find(dpid);
    if (it == by_dpid_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Topology::switch_by_name(std::string_view name) const
{
    for (std::size_t i = 0; i < spec_.switches.size(); ++i)
        if (spec_.switches[i].name == name)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> Topology::host_by_ip(Ipv4Addr ip) const
{
    for (std::size_t i = 0; i < spec_.hosts.size(); ++i)
        if (spec_.hosts[i].ip == ip)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> Topology::host_by_mac(MacAddr mac) const
{
    for (std::size_t i = 0; i < spec_.hosts.size(); ++i)
        if (spec_.hosts[i].mac == mac)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> Topology::host_by_name(std::string_view name) const
{
    for (std::size_t i = 0; i < spec_.hosts.size(); ++i)
        if (spec_.hosts[i].name == name)
            return i;
    return std::nullopt;
}

const PortInfo* Topology::port(std::size_t sw, std::uint32_t no) const
{
    if (sw >= ports_.size() || no == 0 || no > ports_[sw].size())
        return nullptr;
    return &ports_[sw][no - 1];
}

std::vector<std::size_t> Topology::neighbors(std::size_t sw) const
{
    std::vector<std::size_t> out;
    for (const auto& p : ports_[sw])
        if (p.kind == PortKind::SwitchLink)
            out.push_back(p.peer);
    std::sort(out.begin(), out.end());
    return out;
}

std::uint32_t Topology::port_toward(std::size_t sw, std::size_t next) const
{
    for (const auto& p : ports_[sw])
        if (p.kind == PortKind::SwitchLink && p.peer == next)
            return p.no;
    throw Error(Errc::InvalidArgument, "switches not adjacent");
}

std::vector<std::string> Topology::link_ids() const
{
    std::vector<std::string> out;
    for (const auto& l : spec_.links)
        out.push_back(l.a + "-" + l.b);
    for (std::size_t h = 0; h < spec_.hosts.size(); ++h)
        out.push_back(spec_.switches[host_switch_[h]].name + "-" + spec_.hosts[h].name);
    return out;
}

std::vector<std::size_t> Topology::shortest_path(std::size_t from, std::size_t to,
                                                 const std::set<std::size_t>& excluded) const
{
    const std::size_t n = switch_count();
    if (from >= n || to >= n || excluded.count(from) || excluded.count(to))
        return {};
    // BFS distances to the destination, then a greedy walk that always takes the
    // smallest-index neighbour one step closer.
    std::vector<std::size_t> dist(n, SIZE_MAX);
    dist[to] = 0;
    std::deque<std::size_t> q{to};
    while (!q.empty()) {
        auto cur = q.front();
        q.pop_front();
        for (auto nb : neighbors(cur))
            if (!excluded.count(nb) && dist[nb] == SIZE_MAX) {
                dist[nb] = dist[cur] + 1;
                q.push_back(nb);
            }
    }
    if (dist[from] == SIZE_MAX)
        return {};
    std::vector<std::size_t> path{from};
    while (path.back() != to) {
        for (auto nb : neighbors(path.back()))
            if (dist[nb] != SIZE_MAX && dist[nb] + 1 == dist[path.back()]) {
                path.push_back(nb);
                break;
            }
    }
    return path;
}

} // namespace sdnchain::simnet
