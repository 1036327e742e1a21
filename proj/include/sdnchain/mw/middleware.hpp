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

#include "sdnchain/chain/service.hpp"
#include "sdnchain/ofwire/codec.hpp"
#include "sdnchain/ofwire/session.hpp"

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <set>

namespace sdnchain::mw {

using ConnId = std::uint64_t;

// One byte stream toward a peer. Implementations deliver asynchronously.
class Link {
public:
    virtual ~Link() = default;
    virtual void send(const Bytes& bytes) = 0;
    virtual void close() = 0;
};

// A connected controller. Each channel it opens carries the session of one switch;
// bytes from the controller come back through Middleware::controller_bytes(id, ...).
class ControllerPort {
public:
    virtual ~ControllerPort() = default;
    // Returns nullptr when no channel can be opened right now.
    virtual std::shared_ptr<Link> open_channel(ConnId id) = 0;
    // Closes every connection of this controller, including idle ones.
    virtual void shutdown() { }
};

std::string switch_element_id(DatapathId dpid);
std::optional<DatapathId> parse_switch_element_id(std::string_view id);

enum class CaptureMode { All, ControlOnly, Sampled };

std::string_view to_string(CaptureMode m);
CaptureMode parse_capture_mode(std::string_view s);

struct CapturePolicy {
    CaptureMode mode = CaptureMode::All;
    std::uint32_t sample_every = 10;

    // counter is the 0-based index of the forwarded message.
    bool captures(const ofwire::OfMessage& m, std::uint64_t counter) const;
};

enum class Direction { CtrlToSwitch, SwitchToCtrl };

std::string_view to_string(Direction d);

struct SnapshotRecord {
    Bytes bytes;
    Direction direction = Direction::SwitchToCtrl;
    DatapathId switch_id = 0;
    std::string controller_id;
    TimeUs timestamp_us = 0;
    std::string tag; // port_info, transmission_rate, link_status, flow_table, control, mapping

    bool operator==(const SnapshotRecord&) const = default;
};

std::string snapshot_tag(const ofwire::OfMessage& m);
Bytes encode_snapshot(const SnapshotRecord& r);
SnapshotRecord decode_snapshot(ByteView payload); // throws Error(Malformed)

struct MiddlewareConfig {
    std::string id = "mw-1";
    bool open_enrollment = false;
    CapturePolicy capture;
    std::size_t pending_capacity = 256;
    TimeUs echo_interval = ofwire::kDefaultEchoInterval;
    TimeUs handshake_timeout = 10 * kSec;
};

struct ForwardRecord {
    TimeUs at = 0;
    Direction direction = Direction::SwitchToCtrl;
    DatapathId switch_id = 0;
    std::string controller_id;
    std::uint8_t msg_type = 0;
    std::size_t size = 0;
};

struct MwEvent {
    enum class Kind {
        ControllerAccepted,
        ControllerRejected,
        ControllerGone,
        SwitchConnected,
        SwitchRejected,
        SwitchClosed,
        MappingChanged,
        Evicted,
    };
    Kind kind;
    std::string element;
    std::string detail;
    std::optional<std::string> from_controller; // MappingChanged
    std::optional<std::string> to_controller;   // MappingChanged
};

std::string_view to_string(MwEvent::Kind k);

enum class ConnectOutcome { Accepted, Enrolling, Rejected };

struct ConnectResult {
    ConnectOutcome outcome = ConnectOutcome::Rejected;
    std::optional<Errc> reason;
};

// The transparent proxy between controllers and switches.
class Middleware {
public:
    struct SnapshotStats {
        std::uint64_t captured = 0;
        std::uint64_t submitted = 0;
        std::uint64_t committed = 0;
        std::uint64_t failed = 0;
        std::size_t queued = 0;
    };

    Middleware(Scheduler& sched, chain::ChainService& chain, MiddlewareConfig cfg = {});
    ~Middleware();
    Middleware(const Middleware&) = delete;
    Middleware& operator=(const Middleware&) = delete;

    // Registers the middleware element (if needed) and starts the session tick.
    void start();

    ConnId switch_connect(std::shared_ptr<Link> link);
    void switch_bytes(ConnId conn, ByteView bytes);
    void switch_closed(ConnId conn);

    ConnectResult controller_connect(const std::string& controller_id, std::shared_ptr<ControllerPort> port);
    void controller_disconnect(const std::string& controller_id);
    void controller_bytes(ConnId channel, ByteView bytes);
    void controller_channel_closed(ConnId channel);

    // Throws UnknownElement, Evicted or NotFound (controller not connected).
    void remap(DatapathId dpid, const std::string& controller_id);
    // Submits the eviction and closes the element's sessions immediately. Throws UnknownElement.
    void evict(const std::string& element_id, const std::string& reason);

    // Sends a message of the middleware's own (defense entries) to a connected
    // switch and snapshots it. Throws UnknownElement or Evicted.
    void install(DatapathId dpid, const ofwire::OfMessage& m);

    std::map<DatapathId, std::string> mapping() const;
    std::vector<DatapathId> pending_switches() const;
    std::vector<std::string> controllers() const;
    std::vector<DatapathId> connected_switches() const;
    std::size_t buffered(DatapathId dpid) const;

    void set_capture_policy(CapturePolicy p) { cfg_.capture = p; }
    const MiddlewareConfig& config() const { return cfg_; }
    SnapshotStats snapshot_stats() const;
    std::uint64_t forwarded() const { return forwarded_; }
    std::uint64_t dropped() const { return dropped_; }

    void on_forward(std::function<void(const ForwardRecord&)> fn) { forward_hooks_.push_back(std::move(fn)); }
    void on_event(std::function<void(const MwEvent&)> fn) { event_hooks_.push_back(std::move(fn)); }

private:
    struct SwitchSession;
    struct Channel;
    struct ControllerEntry;

    enum class SwitchPhase { Handshaking, Registering, Ready };

    void switch_message(SwitchSession& s, ofwire::StreamDecoder::Item item);
    void controller_message(Channel& ch, ofwire::StreamDecoder::Item item);
    void switch_established(SwitchSession& s);
    void switch_ready(SwitchSession& s);
    void close_switch(ConnId conn, const std::string& reason, bool close_link);
    void close_channel(ConnId channel, bool close_link);
    void drop_controller(const std::string& controller_id, const std::string& reason);
    void attach(SwitchSession& s, const std::string& controller_id, const std::string& reason);
    void place_pending();
    std::optional<std::string> least_loaded() const;
    std::size_t load(const std::string& controller_id) const;
    void flush_pending(SwitchSession& s);
    void to_switch(SwitchSession& s, const ofwire::OfMessage& m);
    void forward_up(SwitchSession& s, const Bytes& raw, const ofwire::OfMessage& m);
    void capture(const SnapshotRecord& r);
    void record_snapshot(Bytes bytes, Direction d, DatapathId dpid, const std::string& ctrl, const ofwire::OfMessage& m);
    void drain();
    void tick();
    void emit(MwEvent ev);
    bool denied(const std::string& element_id) const;
    SwitchSession* session_for(DatapathId dpid);

    Scheduler& sched_;
    chain::ChainService& chain_;
    MiddlewareConfig cfg_;
    std::shared_ptr<bool> alive_;

    ConnId next_conn_ = 1;
    std::map<ConnId, std::unique_ptr<SwitchSession>> switches_;
    std::map<DatapathId, ConnId> by_dpid_;
    std::map<ConnId, std::unique_ptr<Channel>> channels_;
    std::map<std::string, std::unique_ptr<ControllerEntry>> controllers_;
    std::map<DatapathId, std::string> map_;
    std::set<std::string> evicted_local_;

    std::deque<SnapshotRecord> queue_;
    bool drain_scheduled_ = false;
    SnapshotStats snap_;
    std::uint64_t forwarded_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t capture_counter_ = 0;
    std::uint32_t next_xid_ = 0x40000000;

    std::vector<std::function<void(const ForwardRecord&)>> forward_hooks_;
    std::vector<std::function<void(const MwEvent&)>> event_hooks_;
};

} // namespace sdnchain::mw
