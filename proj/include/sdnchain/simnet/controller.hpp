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

#include "sdnchain/guard/guard.hpp"
#include "sdnchain/simnet/pipe.hpp"
#include "sdnchain/simnet/topology.hpp"

#include <functional>
#include <map>
#include <memory>
#include <unordered_map>

namespace sdnchain::simnet {

class ReferenceController;

// State shared by the controller instances of one cluster: the host location
// store, which instance currently holds each switch, and the flood tree.
class ControllerFabric {
public:
    struct Location {
        std::size_t sw = 0;
        std::uint32_t port = 0;
    };

    explicit ControllerFabric(const Topology& topo);

    const Topology& topology() const { return topo_; }
    void learn(MacAddr mac, Location loc) { hosts_[mac.value] = loc; }
    std::optional<Location> locate(MacAddr mac) const;
    std::size_t known_hosts() const { return hosts_.size(); }

    void own(DatapathId dpid, ReferenceController* c, std::uint64_t channel);
    void disown(DatapathId dpid, const ReferenceController* c, std::uint64_t channel);
    // Sends through whichever instance holds the switch. False when nobody does.
    bool send(DatapathId dpid, const ofwire::OfMessage& m);
    std::optional<std::string> owner(DatapathId dpid) const;

    // Ports on the flood tree (BFS from switch 0) plus host ports, per switch.
    const std::vector<std::uint32_t>& flood_ports(std::size_t sw) const { return flood_[sw]; }

private:
    const Topology& topo_;
    std::unordered_map<std::uint64_t, Location> hosts_;
    std::map<DatapathId, std::pair<ReferenceController*, std::uint64_t>> owners_;
    std::vector<std::vector<std::uint32_t>> flood_;
};

struct ControllerConfig {
    std::string id = "c1";
    TimeUs service_time = kMs;   // per packet_in
    std::uint16_t priority = 10; // reactive path entries
    std::uint16_t idle_timeout = 5;
    TimeUs echo_interval = ofwire::kDefaultEchoInterval;
    TimeUs channel_delay = 100;  // one way, microseconds
};

// Minimal learning controller. Learns host locations on edge ports, installs
// {in_port, eth_src, eth_dst} path entries for known destinations and floods
// unknown ones over a tree. Each packet_in costs a fixed service time on a
// single-server queue, which is what controller_load measures.
class ReferenceController : public mw::ControllerPort {
public:
    using UpBytes = std::function<void(mw::ConnId, ByteView)>;
    using UpClosed = std::function<void(mw::ConnId)>;

    ReferenceController(Scheduler& sched, std::shared_ptr<ControllerFabric> fabric, ControllerConfig cfg = {});
    ~ReferenceController() override;

    // Where bytes written on channels from open_channel() go (normally the middleware).
    void set_upstream(UpBytes on_bytes, UpClosed on_closed);

    std::shared_ptr<mw::Link> open_channel(mw::ConnId id) override;
    void shutdown() override;

    // Direct attachment to a switch, no middleware. Returns the channel id.
    mw::ConnId accept(std::shared_ptr<PipeEnd> end);

    void send(std::uint64_t channel, const ofwire::OfMessage& m);

    const ControllerConfig& config() const { return cfg_; }
    const std::string& id() const { return cfg_.id; }
    std::uint64_t packet_ins() const { return packet_ins_; }
    std::uint64_t flow_mods_sent() const { return flow_mods_; }
    const guard::ServiceQueue& queue() const { return queue_; }
    std::map<DatapathId, std::uint64_t> switches() const;
    std::size_t channel_count() const { return chans_.size(); }
    // Every control message received, in order (handshake included).
    const std::vector<Bytes>& control_log() const { return log_; }
    void keep_control_log(bool on) { keep_log_ = on; }

private:
    struct Chan {
        std::shared_ptr<PipeEnd> end;
        ofwire::StreamDecoder decoder;
        ofwire::SessionFsm fsm = ofwire::SessionFsm::for_peer(ofwire::PeerRole::Switch);
        std::optional<DatapathId> dpid;
    };

    void bind(std::uint64_t id, std::shared_ptr<PipeEnd> end);
    void on_bytes(std::uint64_t id, ByteView bytes);
    void on_closed(std::uint64_t id);
    void close(std::uint64_t id);
    void process(DatapathId dpid, const ofwire::PacketIn& pin);
    void tick();

    Scheduler& sched_;
    std::shared_ptr<ControllerFabric> fabric_;
    ControllerConfig cfg_;
    std::shared_ptr<bool> alive_;
    std::map<std::uint64_t, Chan> chans_;
    std::uint64_t next_direct_ = 1ull << 40;
    std::uint32_t next_xid_ = 1;
    guard::ServiceQueue queue_;
    std::uint64_t packet_ins_ = 0;
    std::uint64_t flow_mods_ = 0;
    UpBytes up_bytes_;
    UpClosed up_closed_;
    std::vector<Bytes> log_;
    bool keep_log_ = false;
};

} // namespace sdnchain::simnet
