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
#include "sdnchain/simnet/flow_table.hpp"
#include "sdnchain/simnet/pipe.hpp"

#include <functional>
#include <map>
#include <memory>

namespace sdnchain::simnet {

// Frame-copy bookkeeping shared by every element of one network.
// injected + copies = delivered + dropped + in_flight + buffered at all times.
struct FrameAccounting {
    std::uint64_t injected = 0;
    std::uint64_t copies = 0;   // extra outputs of multi-port actions and controller-built frames
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::int64_t in_flight = 0; // on data links
    std::int64_t buffered = 0;  // held in switch buffers awaiting a PacketOut
};

struct SwitchConfig {
    std::uint32_t n_buffers = 65536;
    TimeUs buffer_ttl = 10 * kSec;
    TimeUs sample_interval = 100 * kMs;
    TimeUs echo_interval = ofwire::kDefaultEchoInterval;
};

// Token bucket in packets per second with a 100 ms burst.
struct Policer {
    double pps = 0;
    double tokens = 0;
    TimeUs last = 0;

    bool admit(TimeUs now);
};

class SimSwitch {
public:
    using FrameOut = std::function<void(std::uint32_t port, const Frame&)>;
    using SampleSink = std::function<void(const guard::TrafficSample&)>;

    struct Counters {
        std::uint64_t rx = 0;
        std::uint64_t tx = 0;
        std::uint64_t rx_bytes = 0;
        std::uint64_t tx_bytes = 0;
    };

    SimSwitch(Scheduler& sched, DatapathId dpid, std::vector<std::uint32_t> ports, FrameAccounting& acct,
              SwitchConfig cfg = {});
    ~SimSwitch();
    SimSwitch(const SimSwitch&) = delete;
    SimSwitch& operator=(const SimSwitch&) = delete;

    void set_output(FrameOut fn) { out_ = std::move(fn); }
    void set_sample_sink(SampleSink fn) { sink_ = std::move(fn); }

    // Opens the control session over `link` (sends Hello) and starts the tick.
    void connect(std::shared_ptr<PipeEnd> link);
    void disconnect();
    // Stops answering echo requests and processing control traffic.
    void silence(bool on) { silenced_ = on; }

    void receive(std::uint32_t in_port, const Frame& f);

    // Management plane, not OpenFlow.
    void set_rate_limit(std::uint32_t port, double pps);
    void clear_rate_limit(std::uint32_t port);
    std::map<std::uint32_t, double> rate_limits() const;

    DatapathId dpid() const { return dpid_; }
    const std::vector<std::uint32_t>& ports() const { return ports_; }
    const FlowTable& table() const { return table_; }
    ofwire::SessionState session_state() const { return fsm_.state; }
    bool connected() const { return link_ != nullptr; }
    std::uint64_t packet_ins() const { return packet_ins_; }
    std::uint64_t flow_mods() const { return flow_mods_; }
    std::size_t buffered() const { return buffers_.size(); }
    Counters port_counters(std::uint32_t port) const;
    // Every control message received, in order (handshake included).
    const std::vector<Bytes>& control_log() const { return control_log_; }
    void keep_control_log(bool on) { keep_log_ = on; }
    // Sees every decoded control message, also while silenced.
    void on_control(std::function<void(const ofwire::OfMessage&, TimeUs)> fn) { control_hook_ = std::move(fn); }
    void send_control(const ofwire::OfMessage& m);

private:
    void control_bytes(ByteView bytes);
    void handle(const ofwire::OfMessage& m);
    void packet_out(const ofwire::PacketOut& po);
    // Emits the frame on each action port; returns the number of copies sent.
    std::size_t emit(const std::vector<ofwire::Action>& actions, std::uint32_t in_port, const Frame& f);
    void output(std::uint32_t port, const Frame& f);
    void tick();
    void flush_samples(TimeUs now);

    Scheduler& sched_;
    DatapathId dpid_;
    std::vector<std::uint32_t> ports_;
    FrameAccounting& acct_;
    SwitchConfig cfg_;
    std::shared_ptr<bool> alive_;

    std::shared_ptr<PipeEnd> link_;
    ofwire::StreamDecoder decoder_;
    ofwire::SessionFsm fsm_ = ofwire::SessionFsm::for_peer(ofwire::PeerRole::Controller);
    bool silenced_ = false;
    bool ticking_ = false;
    std::uint32_t next_xid_ = 1;

    FlowTable table_;
    std::map<std::uint32_t, Policer> policers_;
    std::map<std::uint32_t, std::pair<Frame, TimeUs>> buffers_; // buffer_id -> (frame, stored_at)
    std::uint32_t next_buffer_ = 1;

    std::map<std::uint32_t, Counters> counters_;
    std::map<std::uint32_t, Counters> interval_;
    std::map<guard::FlowKey, std::pair<std::uint64_t, std::uint64_t>> pin_interval_; // packets, bytes
    TimeUs next_sample_ = 0;

    std::uint64_t packet_ins_ = 0;
    std::uint64_t flow_mods_ = 0;
    std::vector<Bytes> control_log_;
    bool keep_log_ = false;

    FrameOut out_;
    SampleSink sink_;
    std::function<void(const ofwire::OfMessage&, TimeUs)> control_hook_;
};

} // namespace sdnchain::simnet
