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

#include "sdnchain/simnet/controller.hpp"
#include "sdnchain/simnet/switch.hpp"

#include <random>

namespace sdnchain::simnet {

struct NetworkConfig {
    TimeUs data_delay = kMs;      // per data link hop
    TimeUs control_delay = 100;   // switch <-> middleware or controller, one way
    std::uint16_t frame_size = 100;
    SwitchConfig switch_config;
};

struct AttackPlan {
    std::size_t victim = 0;   // host index
    std::size_t attacker = 0; // host index, on a different switch
    double rate = 0;          // frames/s
    std::vector<Ipv4Addr> spoofed; // empty: a fresh source per frame
};

// Switches, hosts and data links of one topology on the virtual clock.
class Network {
public:
    Network(Scheduler& sched, Topology topo, NetworkConfig cfg = {}, std::uint64_t seed = 1);
    ~Network();
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    const Topology& topology() const { return topo_; }
    std::size_t switch_count() const { return switches_.size(); }
    SimSwitch& switch_at(std::size_t i) { return *switches_.at(i); }
    const SimSwitch& switch_at(std::size_t i) const { return *switches_.at(i); }
    SimSwitch* by_dpid(DatapathId dpid);

    // Control plane: each switch opens one session into the middleware.
    void attach(mw::Middleware& mw);
    // Control plane without middleware.
    void attach_direct(ReferenceController& c);

    // Data plane.
    Frame frame(std::size_t src_host, std::size_t dst_host) const;
    void send(std::size_t host, const Frame& f);
    // One broadcast frame from every host, spaced `gap` apart from `at`, so the
    // controllers learn host locations the way ARP would.
    void announce_hosts(TimeUs at, TimeUs gap = kMs);
    // Constant-rate frames from src to dst in [start, stop).
    void start_flow(std::size_t src, std::size_t dst, double fps, TimeUs start, TimeUs stop);
    // One attacker per victim, each frame with a unique eth_src so it misses every
    // reactive entry. Throws UnknownVictim.
    std::vector<AttackPlan> ddos_generate(const std::vector<Ipv4Addr>& victims, std::uint32_t spoofed_source_count,
                                          double rate, TimeUs start, TimeUs until,
                                          const std::set<std::size_t>& avoid_hosts = {});
    void stop_attacks(TimeUs at) { attack_stop_ = std::min(attack_stop_, at); }
    std::uint64_t attack_frames() const { return attack_frames_; }

    void set_sample_sink(SimSwitch::SampleSink sink);

    const FrameAccounting& accounting() const { return acct_; }
    // injected + copies == delivered + dropped + in_flight + buffered
    bool conserved() const;
    std::uint64_t host_rx(std::size_t h) const { return host_rx_.at(h); }
    std::uint64_t link_bytes(const std::string& link_id) const;

private:
    void deliver(std::size_t sw, std::uint32_t port, const Frame& f);
    void schedule_flow(std::size_t src, const Frame& base, double fps, TimeUs start, TimeUs stop, bool attack,
                       std::vector<Ipv4Addr> pool);

    Scheduler& sched_;
    Topology topo_;
    NetworkConfig cfg_;
    std::mt19937_64 rng_;
    std::shared_ptr<bool> alive_;
    FrameAccounting acct_;
    std::vector<std::unique_ptr<SimSwitch>> switches_;
    std::vector<std::uint64_t> host_rx_;
    std::map<std::string, std::uint64_t> link_bytes_;
    TimeUs attack_stop_ = INT64_MAX;
    std::uint64_t attack_frames_ = 0;
    std::uint64_t next_spoofed_mac_ = 0;
    std::set<std::size_t> attackers_;
};

} // namespace sdnchain::simnet
