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


#include "sdnchain/mw/middleware.hpp"

#include "sdnchain/core/error.hpp"

#include <json.hpp>

#include <cstdio>

namespace sdnchain::mw {

using ofwire::OfMessage;
using ofwire::SessionFsm;

std::string switch_element_id(DatapathId dpid)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "of:%016llx", static_cast<unsigned long long>(dpid));
    return buf;
}

std::optional<DatapathId> parse_switch_element_id(std::string_view id)
{
    if (id.size() != 19 || id.substr(0, 3) != "of:")
        return std::nullopt;
    DatapathId v = 0;
    for (char c : id.substr(3)) {
        int d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else
            return std::nullopt;
        v = v << 4 | static_cast<DatapathId>(d);
    }
    return v;
}

std::string_view to_string(CaptureMode m)
{
    switch (m) {
    case CaptureMode::All: return "all";
    case CaptureMode::ControlOnly: return "control-only";
    case CaptureMode::Sampled: return "sampled";
    }
    return "?";
}

CaptureMode parse_capture_mode(std::string_view s)
{
    if (s == "all")
        return CaptureMode::All;
    if (s == "control-only" || s == "control_only")
        return CaptureMode::ControlOnly;
    if (s == "sampled")
        return CaptureMode::Sampled;
    throw Error(Errc::InvalidArgument, "unknown capture mode: " + std::string(s));
}

bool CapturePolicy::captures(const OfMessage& m, std::uint64_t counter) const
{
    switch (mode) {
    case CaptureMode::All:
        return true;
    case CaptureMode::ControlOnly:
        return m.is<ofwire::FlowMod>() || m.is<ofwire::FeaturesReply>() || m.is<ofwire::ErrorMsg>();
    case CaptureMode::Sampled:
        return sample_every <= 1 || counter % sample_every == 0;
    }
    return false;
}

std::string_view to_string(Direction d)
{
    return d == Direction::CtrlToSwitch ? "ctrl_to_switch" : "switch_to_ctrl";
}

std::string_view to_string(MwEvent::Kind k)
{
    switch (k) {
    case MwEvent::Kind::ControllerAccepted: return "controller_accepted";
    case MwEvent::Kind::ControllerRejected: return "controller_rejected";
    case MwEvent::Kind::ControllerGone: return "controller_gone";
    case MwEvent::Kind::SwitchConnected: return "switch_connected";
    case MwEvent::Kind::SwitchRejected: return "switch_rejected";
    case MwEvent::Kind::SwitchClosed: return "switch_closed";
    case MwEvent::Kind::MappingChanged: return "mapping_changed";
    case MwEvent::Kind::Evicted: return "evicted";
    }
    return "?";
}

std::string snapshot_tag(const OfMessage& m)
{
    if (m.is<ofwire::FeaturesReply>())
        return "port_info";
    if (m.is<ofwire::PacketIn>())
        return "transmission_rate";
    if (m.is<ofwire::FlowMod>() || m.is<ofwire::PacketOut>())
        return "flow_table";
    if (m.type_code() == 12) // OFPT_PORT_STATUS
        return "link_status";
    return "control";
}

Bytes encode_snapshot(const SnapshotRecord& r)
{
    nlohmann::ordered_json j;
    j["v"] = 1;
    j["direction"] = to_string(r.direction);
    j["switch_id"] = switch_element_id(r.switch_id);
    j["controller_id"] = r.controller_id;
    j["timestamp_us"] = r.timestamp_us;
    j["tag"] = r.tag;
    j["bytes"] = to_hex(r.bytes);
    return to_bytes(j.dump());
}

SnapshotRecord decode_snapshot(ByteView payload)
{
    try {
        auto j = nlohmann::json::parse(payload.begin(), payload.end());
        SnapshotRecord r;
        auto dir = j.at("direction").get<std::string>();
        if (dir != "ctrl_to_switch" && dir != "switch_to_ctrl")
            throw Error(Errc::Malformed, "bad direction");
        r.direction = dir == "ctrl_to_switch" ? Direction::CtrlToSwitch : Direction::SwitchToCtrl;
        auto sid = parse_switch_element_id(j.at("switch_id").get<std::string>());
        if (!sid)
            throw Error(Errc::Malformed, "bad switch id");
        r.switch_id = *sid;
        r.controller_id = j.at("controller_id").get<std::string>();
        r.timestamp_us = j.at("timestamp_us").get<TimeUs>();
        r.tag = j.at("tag").get<std::string>();
        r.bytes = from_hex(j.at("bytes").get<std::string>());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Malformed, std::string("snapshot payload: ") + e.what());
    }
}

struct Middleware::SwitchSession {
    ConnId conn = 0;
    std::shared_ptr<Link> link;
    ofwire::StreamDecoder decoder;
    SessionFsm fsm = SessionFsm::for_peer(ofwire::PeerRole::Switch);
    SwitchPhase phase = SwitchPhase::Handshaking;
    Bytes hello_raw;
    Bytes features_raw;
    std::optional<DatapathId> dpid;
    std::deque<std::pair<Bytes, OfMessage>> pending;
    std::optional<ConnId> channel;
    TimeUs connected_at = 0;
};

struct Middleware::Channel {
    ConnId id = 0;
    ConnId switch_conn = 0;
    DatapathId dpid = 0;
    std::string controller;
    std::shared_ptr<Link> link;
    ofwire::StreamDecoder decoder;
    SessionFsm fsm = SessionFsm::for_peer(ofwire::PeerRole::Controller);
    bool ready = false;
};

struct Middleware::ControllerEntry {
    std::string id;
    std::shared_ptr<ControllerPort> port;
    bool ready = false;
};

Middleware::Middleware(Scheduler& sched, chain::ChainService& chain, MiddlewareConfig cfg)
    : sched_(sched), chain_(chain), cfg_(std::move(cfg)), alive_(std::make_shared<bool>(true))
{
}

Middleware::~Middleware()
{
    *alive_ = false;
}

void Middleware::start()
{
    if (!chain_.is_registered(cfg_.id) && !chain_.ledger().registry().find(cfg_.id))
        chain_.register_element(cfg_.id, chain::Role::Middleware, "middleware", cfg_.id);
    std::weak_ptr<bool> alive = alive_;
    auto self = this;
    auto schedule = std::make_shared<std::function<void()>>();
    *schedule = [self, alive, schedule] {
        auto a = alive.lock();
        if (!a || !*a)
            return;
        self->tick();
        self->sched_.after(ofwire::kSchedulerTick, *schedule);
    };
    sched_.after(ofwire::kSchedulerTick, *schedule);
}

void Middleware::emit(MwEvent ev)
{
    for (const auto& fn : event_hooks_)
        fn(ev);
}

bool Middleware::denied(const std::string& element_id) const
{
    return evicted_local_.count(element_id) || chain_.ledger().registry().is_evicted(element_id);
}

Middleware::SwitchSession* Middleware::session_for(DatapathId dpid)
{
    auto it = by_dpid_.find(dpid);
    if (it == by_dpid_.end())
        return nullptr;
    auto s = switches_.find(it->second);
    return s == switches_.end() ? nullptr : s->second.get();
}

ConnId Middleware::switch_connect(std::shared_ptr<Link> link)
{
    auto s = std::make_unique<SwitchSession>();
    s->conn = next_conn_++;
    s->link = std::move(link);
    s->fsm.echo_interval = cfg_.echo_interval;
    s->connected_at = sched_.now();
    ConnId id = s->conn;
    switches_.emplace(id, std::move(s));
    return id;
}

void Middleware::switch_bytes(ConnId conn, ByteView bytes)
{
    auto it = switches_.find(conn);
    if (it == switches_.end())
        return;
    it->second->decoder.feed(bytes);
    while (true) {
        auto sit = switches_.find(conn);
        if (sit == switches_.end())
            return;
        std::optional<ofwire::StreamDecoder::Item> item;
        try {
            item = sit->second->decoder.next();
        } catch (const Error& e) {
            close_switch(conn, e.what(), true);
            return;
        }
        if (!item)
            return;
        switch_message(*sit->second, std::move(*item));
    }
}

void Middleware::switch_closed(ConnId conn)
{
    close_switch(conn, "peer closed", false);
}

void Middleware::switch_message(SwitchSession& s, ofwire::StreamDecoder::Item item)
{
    if (item.msg.is<ofwire::Hello>() && s.fsm.state == ofwire::SessionState::AwaitHello)
        s.hello_raw = item.raw;
    auto res = ofwire::step(s.fsm, ofwire::Received{item.msg});
    s.fsm = res.fsm;
    const ConnId conn = s.conn;
    for (auto& action : res.actions) {
        if (!switches_.count(conn))
            return;
        if (auto* send = std::get_if<ofwire::Send>(&action)) {
            to_switch(s, send->msg);
        } else if (auto* d = std::get_if<ofwire::Deliver>(&action)) {
            if (s.phase == SwitchPhase::Handshaking && d->msg.is<ofwire::FeaturesReply>()) {
                s.features_raw = item.raw;
                switch_established(s);
            } else {
                forward_up(s, item.raw, d->msg);
            }
        } else {
            close_switch(conn, std::get<ofwire::Disconnect>(action).reason, true);
        }
    }
}

void Middleware::switch_established(SwitchSession& s)
{
    const DatapathId dpid = s.fsm.features->datapath_id;
    const std::string eid = switch_element_id(dpid);
    if (denied(eid)) {
        emit({MwEvent::Kind::SwitchRejected, eid, std::string(to_string(Errc::Evicted)), {}, {}});
        close_switch(s.conn, "evicted", true);
        return;
    }
    if (by_dpid_.count(dpid)) {
        emit({MwEvent::Kind::SwitchRejected, eid, std::string(to_string(Errc::DuplicateDatapathId)), {}, {}});
        close_switch(s.conn, "duplicate datapath id", true);
        return;
    }
    s.dpid = dpid;
    by_dpid_[dpid] = s.conn;
    emit({MwEvent::Kind::SwitchConnected, eid, {}, {}, {}});
    if (chain_.is_registered(eid)) {
        switch_ready(s);
        return;
    }
    s.phase = SwitchPhase::Registering;
    nlohmann::ordered_json info;
    info["hello"] = to_hex(s.hello_raw);
    info["features_reply"] = to_hex(s.features_raw);
    std::weak_ptr<bool> alive = alive_;
    const ConnId conn = s.conn;
    try {
        chain_.register_element(eid, chain::Role::Switch, info.dump(), cfg_.id,
                                [this, alive, conn, eid](const chain::Receipt&) {
                                    auto a = alive.lock();
                                    if (!a || !*a)
                                        return;
                                    auto it = switches_.find(conn);
                                    if (it == switches_.end())
                                        return;
                                    if (chain_.is_registered(eid))
                                        switch_ready(*it->second);
                                    else
                                        close_switch(conn, "registration refused", true);
                                });
    } catch (const Error& e) {
        close_switch(conn, e.what(), true);
    }
}

void Middleware::switch_ready(SwitchSession& s)
{
    if (s.phase == SwitchPhase::Ready)
        return;
    s.phase = SwitchPhase::Ready;
    if (auto c = least_loaded())
        attach(s, *c, "initial");
}

std::size_t Middleware::load(const std::string& controller_id) const
{
    std::size_t n = 0;
    for (const auto& [dpid, c] : map_)
        n += c == controller_id;
    return n;
}

std::optional<std::string> Middleware::least_loaded() const
{
    std::optional<std::string> best;
    std::size_t best_load = SIZE_MAX;
    for (const auto& [id, entry] : controllers_) { // map order = lowest id first
        if (!entry->ready || denied(id))
            continue;
        std::size_t l = load(id);
        if (l < best_load) {
            best = id;
            best_load = l;
        }
    }
    return best;
}

void Middleware::attach(SwitchSession& s, const std::string& controller_id, const std::string& reason)
{
    auto& entry = *controllers_.at(controller_id);
    const ConnId id = next_conn_++;
    auto link = entry.port->open_channel(id);
    if (!link)
        return;
    std::optional<std::string> from;
    if (auto it = map_.find(*s.dpid); it != map_.end())
        from = it->second;
    if (s.channel)
        close_channel(*s.channel, true);
    auto ch = std::make_unique<Channel>();
    ch->id = id;
    ch->switch_conn = s.conn;
    ch->dpid = *s.dpid;
    ch->controller = controller_id;
    ch->link = link;
    ch->fsm.echo_interval = cfg_.echo_interval;
    channels_.emplace(id, std::move(ch));
    s.channel = id;
    map_[*s.dpid] = controller_id;
    // Replay the switch's own Hello so the controller sees the original handshake.
    link->send(s.hello_raw);
    emit({MwEvent::Kind::MappingChanged, switch_element_id(*s.dpid), reason, from, controller_id});
}

void Middleware::place_pending()
{
    std::vector<ConnId> waiting;
    for (const auto& [conn, s] : switches_)
        if (s->phase == SwitchPhase::Ready && !s->channel)
            waiting.push_back(conn);
    for (ConnId conn : waiting) {
        auto c = least_loaded();
        if (!c)
            return;
        attach(*switches_.at(conn), *c, "placement");
    }
}

void Middleware::to_switch(SwitchSession& s, const OfMessage& m)
{
    s.link->send(ofwire::encode(m));
}

void Middleware::forward_up(SwitchSession& s, const Bytes& raw, const OfMessage& m)
{
    Channel* ch = nullptr;
    if (s.phase == SwitchPhase::Ready && s.channel) {
        auto it = channels_.find(*s.channel);
        if (it != channels_.end() && it->second->ready)
            ch = it->second.get();
    }
    if (!ch || !s.pending.empty()) {
        s.pending.emplace_back(raw, m);
        if (s.pending.size() > cfg_.pending_capacity) {
            s.pending.pop_front();
            ++dropped_;
        }
        if (ch)
            flush_pending(s);
        return;
    }
    ch->link->send(raw);
    ++forwarded_;
    for (const auto& fn : forward_hooks_)
        fn({sched_.now(), Direction::SwitchToCtrl, *s.dpid, ch->controller, m.type_code(), raw.size()});
    record_snapshot(raw, Direction::SwitchToCtrl, *s.dpid, ch->controller, m);
}

void Middleware::flush_pending(SwitchSession& s)
{
    if (!s.channel)
        return;
    auto it = channels_.find(*s.channel);
    if (it == channels_.end() || !it->second->ready)
        return;
    Channel& ch = *it->second;
    while (!s.pending.empty()) {
        auto [raw, m] = std::move(s.pending.front());
        s.pending.pop_front();
        ch.link->send(raw);
        ++forwarded_;
        for (const auto& fn : forward_hooks_)
            fn({sched_.now(), Direction::SwitchToCtrl, *s.dpid, ch.controller, m.type_code(), raw.size()});
        record_snapshot(raw, Direction::SwitchToCtrl, *s.dpid, ch.controller, m);
    }
}

ConnectResult Middleware::controller_connect(const std::string& controller_id, std::shared_ptr<ControllerPort> port)
{
    auto reject = [&](Errc why) {
        emit({MwEvent::Kind::ControllerRejected, controller_id, std::string(to_string(why)), {}, {}});
        if (port)
            port->shutdown();
        return ConnectResult{ConnectOutcome::Rejected, why};
    };
    if (denied(controller_id))
        return reject(Errc::Evicted);
    const auto* rec = chain_.ledger().registry().find(controller_id);
    if (rec && rec->role != chain::Role::Controller)
        return reject(Errc::NotRegistered);
    if (auto it = controllers_.find(controller_id); it != controllers_.end()) {
        it->second->port = std::move(port);
        return {it->second->ready ? ConnectOutcome::Accepted : ConnectOutcome::Enrolling, std::nullopt};
    }
    auto entry = std::make_unique<ControllerEntry>();
    entry->id = controller_id;
    entry->port = port;
    if (rec) {
        entry->ready = true;
        controllers_.emplace(controller_id, std::move(entry));
        emit({MwEvent::Kind::ControllerAccepted, controller_id, {}, {}, {}});
        place_pending();
        return {ConnectOutcome::Accepted, std::nullopt};
    }
    if (!cfg_.open_enrollment)
        return reject(Errc::NotRegistered);

    controllers_.emplace(controller_id, std::move(entry));
    std::weak_ptr<bool> alive = alive_;
    auto settle = [this, alive, controller_id](std::optional<Errc> failure) {
        auto a = alive.lock();
        if (!a || !*a)
            return;
        auto it = controllers_.find(controller_id);
        if (it == controllers_.end() || it->second->ready)
            return;
        if (!failure && chain_.is_registered(controller_id)) {
            it->second->ready = true;
            emit({MwEvent::Kind::ControllerAccepted, controller_id, "enrolled", {}, {}});
            place_pending();
            return;
        }
        auto port = it->second->port;
        controllers_.erase(it);
        emit({MwEvent::Kind::ControllerRejected, controller_id,
              std::string(to_string(failure.value_or(Errc::NotRegistered))), {}, {}});
        if (port)
            port->shutdown();
    };
    chain_.submit(chain_.make_tx(chain::TxKind::Register,
                                 chain::encode_register_op({chain::RegisterOp::Op::Register, controller_id,
                                                            chain::Role::Controller, {}, {}}),
                                 cfg_.id),
                  [settle](const chain::Receipt&) { settle(std::nullopt); },
                  [settle](const Error& e) { settle(e.code()); });
    return {ConnectOutcome::Enrolling, std::nullopt};
}

void Middleware::controller_disconnect(const std::string& controller_id)
{
    drop_controller(controller_id, "disconnected");
}

void Middleware::drop_controller(const std::string& controller_id, const std::string& reason)
{
    auto it = controllers_.find(controller_id);
    if (it == controllers_.end())
        return;
    auto port = it->second->port;
    controllers_.erase(it);
    std::vector<ConnId> chans;
    for (const auto& [id, ch] : channels_)
        if (ch->controller == controller_id)
            chans.push_back(id);
    for (ConnId id : chans)
        close_channel(id, true);
    for (auto m = map_.begin(); m != map_.end();)
        m = m->second == controller_id ? map_.erase(m) : std::next(m);
    if (port)
        port->shutdown();
    emit({MwEvent::Kind::ControllerGone, controller_id, reason, {}, {}});
    // Orphaned switches move to the survivors right away.
    std::vector<ConnId> waiting;
    for (const auto& [conn, s] : switches_)
        if (s->phase == SwitchPhase::Ready && !s->channel)
            waiting.push_back(conn);
    for (ConnId conn : waiting) {
        auto& s = *switches_.at(conn);
        auto c = least_loaded();
        if (c)
            attach(s, *c, reason);
        else
            emit({MwEvent::Kind::MappingChanged, switch_element_id(*s.dpid), reason, controller_id, std::nullopt});
    }
}

void Middleware::controller_bytes(ConnId channel, ByteView bytes)
{
    auto it = channels_.find(channel);
    if (it == channels_.end())
        return;
    it->second->decoder.feed(bytes);
    while (true) {
        auto cit = channels_.find(channel);
        if (cit == channels_.end())
            return;
        std::optional<ofwire::StreamDecoder::Item> item;
        try {
            item = cit->second->decoder.next();
        } catch (const Error&) {
            drop_controller(cit->second->controller, "malformed stream");
            return;
        }
        if (!item)
            return;
        controller_message(*cit->second, std::move(*item));
    }
}

void Middleware::controller_channel_closed(ConnId channel)
{
    auto it = channels_.find(channel);
    if (it == channels_.end())
        return;
    drop_controller(it->second->controller, "channel closed");
}

void Middleware::controller_message(Channel& ch, ofwire::StreamDecoder::Item item)
{
    auto res = ofwire::step(ch.fsm, ofwire::Received{item.msg});
    ch.fsm = res.fsm;
    const ConnId id = ch.id;
    for (auto& action : res.actions) {
        auto cit = channels_.find(id);
        if (cit == channels_.end())
            return;
        if (auto* send = std::get_if<ofwire::Send>(&action)) {
            ch.link->send(ofwire::encode(send->msg));
        } else if (auto* d = std::get_if<ofwire::Deliver>(&action)) {
            auto sit = switches_.find(ch.switch_conn);
            if (sit == switches_.end())
                return;
            SwitchSession& s = *sit->second;
            if (d->msg.is<ofwire::FeaturesRequest>()) {
                // Answered from the switch's recorded reply under the request's xid.
                Bytes reply = s.features_raw;
                for (int i = 0; i < 4; ++i)
                    reply[4 + i] = static_cast<std::uint8_t>(d->msg.xid >> (24 - 8 * i));
                ch.link->send(reply);
                if (!ch.ready) {
                    ch.ready = true;
                    flush_pending(s);
                }
                continue;
            }
            s.link->send(item.raw);
            ++forwarded_;
            for (const auto& fn : forward_hooks_)
                fn({sched_.now(), Direction::CtrlToSwitch, ch.dpid, ch.controller, d->msg.type_code(), item.raw.size()});
            record_snapshot(item.raw, Direction::CtrlToSwitch, ch.dpid, ch.controller, d->msg);
        } else {
            drop_controller(ch.controller, std::get<ofwire::Disconnect>(action).reason);
            return;
        }
    }
}

void Middleware::close_channel(ConnId channel, bool close_link)
{
    auto it = channels_.find(channel);
    if (it == channels_.end())
        return;
    auto ch = std::move(it->second);
    channels_.erase(it);
    if (close_link)
        ch->link->close();
    auto sit = switches_.find(ch->switch_conn);
    if (sit != switches_.end() && sit->second->channel == channel)
        sit->second->channel.reset();
}

void Middleware::close_switch(ConnId conn, const std::string& reason, bool close_link)
{
    auto it = switches_.find(conn);
    if (it == switches_.end())
        return;
    auto s = std::move(it->second);
    switches_.erase(it);
    if (close_link)
        s->link->close();
    if (s->channel)
        close_channel(*s->channel, true);
    if (s->dpid) {
        auto b = by_dpid_.find(*s->dpid);
        if (b != by_dpid_.end() && b->second == conn) {
            by_dpid_.erase(b);
            map_.erase(*s->dpid);
        }
        emit({MwEvent::Kind::SwitchClosed, switch_element_id(*s->dpid), reason, {}, {}});
    }
}

void Middleware::remap(DatapathId dpid, const std::string& controller_id)
{
    SwitchSession* s = session_for(dpid);
    if (!s)
        throw Error(Errc::UnknownElement, "switch not connected: " + switch_element_id(dpid));
    if (denied(controller_id))
        throw Error(Errc::Evicted, "controller evicted: " + controller_id);
    auto it = controllers_.find(controller_id);
    if (it == controllers_.end() || !it->second->ready) {
        if (chain_.ledger().registry().find(controller_id))
            throw Error(Errc::NotFound, "controller not connected: " + controller_id);
        throw Error(Errc::UnknownElement, "unknown controller: " + controller_id);
    }
    if (s->phase != SwitchPhase::Ready)
        throw Error(Errc::InvalidArgument, "switch not ready: " + switch_element_id(dpid));
    auto cur = map_.find(dpid);
    if (cur != map_.end() && cur->second == controller_id)
        return;
    attach(*s, controller_id, "remap");
    if (s->channel) {
        SnapshotRecord r{s->features_raw, Direction::SwitchToCtrl, dpid, controller_id, sched_.now(), "mapping"};
        capture(r);
    }
}

void Middleware::evict(const std::string& element_id, const std::string& reason)
{
    if (element_id == cfg_.id)
        throw Error(Errc::InvalidArgument, "cannot evict the middleware itself");
    const auto* rec = chain_.ledger().registry().find(element_id);
    auto dpid = parse_switch_element_id(element_id);
    bool known = rec || controllers_.count(element_id) || (dpid && by_dpid_.count(*dpid));
    if (!known)
        throw Error(Errc::UnknownElement, "unknown element: " + element_id);
    evicted_local_.insert(element_id);
    if (rec && rec->status == chain::RegStatus::Registered)
        chain_.evict_element(element_id, reason, cfg_.id);
    emit({MwEvent::Kind::Evicted, element_id, reason, {}, {}});
    if (controllers_.count(element_id))
        drop_controller(element_id, "evicted");
    if (dpid) {
        if (auto b = by_dpid_.find(*dpid); b != by_dpid_.end())
            close_switch(b->second, "evicted", true);
    }
}

void Middleware::install(DatapathId dpid, const OfMessage& m)
{
    const std::string eid = switch_element_id(dpid);
    if (denied(eid))
        throw Error(Errc::Evicted, "switch evicted: " + eid);
    SwitchSession* s = session_for(dpid);
    if (!s || s->fsm.state != ofwire::SessionState::Established)
        throw Error(Errc::UnknownElement, "switch not connected: " + eid);
    OfMessage out = m;
    if (out.xid == 0)
        out.xid = next_xid_++;
    Bytes raw = ofwire::encode(out);
    s->link->send(raw);
    record_snapshot(std::move(raw), Direction::CtrlToSwitch, dpid, cfg_.id, out);
}

std::map<DatapathId, std::string> Middleware::mapping() const
{
    return map_;
}

std::vector<DatapathId> Middleware::pending_switches() const
{
    std::vector<DatapathId> out;
    for (const auto& [conn, s] : switches_) {
        if (!s->dpid)
            continue;
        bool forwarding = false;
        if (s->channel) {
            auto it = channels_.find(*s->channel);
            forwarding = it != channels_.end() && it->second->ready;
        }
        if (!forwarding)
            out.push_back(*s->dpid);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Middleware::controllers() const
{
    std::vector<std::string> out;
    for (const auto& [id, e] : controllers_)
        if (e->ready)
            out.push_back(id);
    return out;
}

std::vector<DatapathId> Middleware::connected_switches() const
{
    std::vector<DatapathId> out;
    for (const auto& [dpid, conn] : by_dpid_)
        out.push_back(dpid);
    return out;
}

std::size_t Middleware::buffered(DatapathId dpid) const
{
    auto it = by_dpid_.find(dpid);
    if (it == by_dpid_.end())
        return 0;
    return switches_.at(it->second)->pending.size();
}

void Middleware::record_snapshot(Bytes bytes, Direction d, DatapathId dpid, const std::string& ctrl, const OfMessage& m)
{
    if (!cfg_.capture.captures(m, capture_counter_++))
        return;
    capture({std::move(bytes), d, dpid, ctrl, sched_.now(), snapshot_tag(m)});
}

void Middleware::capture(const SnapshotRecord& r)
{
    ++snap_.captured;
    queue_.push_back(r);
    if (drain_scheduled_)
        return;
    drain_scheduled_ = true;
    std::weak_ptr<bool> alive = alive_;
    sched_.after(0, [this, alive] {
        auto a = alive.lock();
        if (a && *a)
            drain();
    });
}

void Middleware::drain()
{
    drain_scheduled_ = false;
    std::weak_ptr<bool> alive = alive_;
    while (!queue_.empty()) {
        auto r = std::move(queue_.front());
        queue_.pop_front();
        try {
            chain_.submit(
                chain::TxKind::Snapshot, encode_snapshot(r), cfg_.id,
                [this, alive](const chain::Receipt&) {
                    if (auto a = alive.lock(); a && *a)
                        ++snap_.committed;
                },
                [this, alive](const Error&) {
                    if (auto a = alive.lock(); a && *a)
                        ++snap_.failed;
                });
            ++snap_.submitted;
        } catch (const Error&) {
            ++snap_.failed;
        }
    }
}

Middleware::SnapshotStats Middleware::snapshot_stats() const
{
    auto s = snap_;
    s.queued = queue_.size();
    return s;
}

void Middleware::tick()
{
    const TimeUs now = sched_.now();
    std::vector<ConnId> conns;
    for (const auto& [conn, s] : switches_)
        conns.push_back(conn);
    for (ConnId conn : conns) {
        auto it = switches_.find(conn);
        if (it == switches_.end())
            continue;
        auto& s = *it->second;
        if (s.fsm.state != ofwire::SessionState::Established) {
            if (now - s.connected_at >= cfg_.handshake_timeout)
                close_switch(conn, std::string(to_string(Errc::HandshakeTimeout)), true);
            continue;
        }
        auto res = ofwire::step(s.fsm, ofwire::TimerTick{now});
        s.fsm = res.fsm;
        for (auto& a : res.actions) {
            if (auto* send = std::get_if<ofwire::Send>(&a)) {
                to_switch(s, send->msg);
            } else if (std::holds_alternative<ofwire::Disconnect>(a)) {
                close_switch(conn, std::get<ofwire::Disconnect>(a).reason, true);
                break;
            }
        }
    }
    std::vector<ConnId> chans;
    for (const auto& [id, ch] : channels_)
        if (ch->fsm.state == ofwire::SessionState::Established)
            chans.push_back(id);
    for (ConnId id : chans) {
        auto it = channels_.find(id);
        if (it == channels_.end())
            continue;
        auto& ch = *it->second;
        auto res = ofwire::step(ch.fsm, ofwire::TimerTick{now});
        ch.fsm = res.fsm;
        for (auto& a : res.actions) {
            if (auto* send = std::get_if<ofwire::Send>(&a)) {
                ch.link->send(ofwire::encode(send->msg));
            } else if (std::holds_alternative<ofwire::Disconnect>(a)) {
                drop_controller(ch.controller, std::get<ofwire::Disconnect>(a).reason);
                break;
            }
        }
    }
}

} // namespace sdnchain::mw
