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


#pragma once

#include "sdnchain/core/net.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sdnchain::simnet {

struct SwitchSpec {
    std::string name;
    DatapathId dpid = 0;
};

struct LinkSpec {
    std::string a;
    std::string b;
    double capacity_mbps = 1000;
};

struct HostSpec {
    std::string name;
    MacAddr mac;
    Ipv4Addr ip;
    std::string attached_to; // switch name
};

struct TopologySpec {
    std::string name;
    std::vector<SwitchSpec> switches;
    std::vector<LinkSpec> links;
    std::vector<HostSpec> hosts;

    // Throws InvalidArgument (disconnected graph, unknown names, duplicate
    // addresses) or DuplicateDatapathId.
    void validate() const;
};

// Six switches in a ring with one chord (s1-s4) and 25 hosts 10.0.0.1-25
// spread round-robin over the switches.
TopologySpec default_topology();
// Built-in shapes: default6, line6, ring6, star6, mesh6, tree7, grid6 (2x3).
// Hosts are spread round-robin over the switches. Throws InvalidArgument.
TopologySpec named_topology(std::string_view name, std::size_t hosts = 25);
std::vector<std::string> named_topologies();

TopologySpec topology_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TopologySpec& t);

enum class PortKind { SwitchLink, Host };

struct PortInfo {
    std::uint32_t no = 0;
    PortKind kind = PortKind::SwitchLink;
    std::size_t peer = 0;         // switch index or host index
    std::uint32_t peer_port = 0;  // port on the peer switch (SwitchLink only)
    std::string link_id;
};

// Indexed, validated view of a topology. Switch indices follow spec order;
// inter-switch ports are numbered from 1 in link order, host ports follow.
class Topology {
public:
    explicit Topology(TopologySpec spec);

    const TopologySpec& spec() const { return spec_; }
    std::size_t switch_count() const { return spec_.switches.size(); }
    std::size_t host_count() const { return spec_.hosts.size(); }
    DatapathId dpid(std::size_t sw) const { return spec_.switches[sw].dpid; }
    const std::string& switch_name(std::size_t sw) const { return spec_.switches[sw].name; }
    std::optional<std::size_t> switch_index(DatapathId dpid) const;
    std::optional<std::size_t> switch_by_name(std::string_view name) const;
    const HostSpec& host(std::size_t h) const { return spec_.hosts[h]; }
    std::optional<std::size_t> host_by_ip(Ipv4Addr ip) const;
    std::optional<std::size_t> host_by_mac(MacAddr mac) const;
    std::optional<std::size_t> host_by_name(std::string_view name) const;

    const std::vector<PortInfo>& ports(std::size_t sw) const { return ports_[sw]; }
    const PortInfo* port(std::size_t sw, std::uint32_t no) const;
    std::size_t host_switch(std::size_t h) const { return host_switch_[h]; }
    std::uint32_t host_port(std::size_t h) const { return host_port_[h]; }
    std::vector<std::size_t> neighbors(std::size_t sw) const;
    std::uint32_t port_toward(std::size_t sw, std::size_t next) const;
    std::vector<std::string> link_ids() const;

    // Fewest hops; among equal-length paths the lexicographically smallest
    // sequence of switch indices. Empty when unreachable or an endpoint is excluded.
    std::vector<std::size_t> shortest_path(std::size_t from, std::size_t to,
                                           const std::set<std::size_t>& excluded = {}) const;

private:
    TopologySpec spec_;
    std::vector<std::vector<PortInfo>> ports_;
    std::vector<std::size_t> host_switch_;
    std::vector<std::uint32_t> host_port_;
    std::map<DatapathId, std::size_t> by_dpid_;
};

} // namespace sdnchain::simnet
