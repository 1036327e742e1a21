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


#include "sdnchain/simnet/switch.hpp"

#include "sdnchain/core/error.hpp"
#include "sdnchain/ofwire/codec.hpp"

#include <algorithm>

namespace sdnchain::simnet {

using ofwire::OfMessage;

bool Policer::admit(TimeUs now)
{
    const double burst = std::max(1.0, pps * 0.1);
    tokens = std::min(burst, tokens + to_seconds(now - last) * pps);
    last = now;
    if (tokens >= 1.0) {
        tokens -= 1.0;
        return true;
    }
    return false;
}

SimSwitch::SimSwitch(Scheduler& sched, DatapathId dpid, std::vector<std::uint32_t> ports, FrameAccounting& acct,
                     SwitchConfig cfg)
    : sched_(sched), dpid_(dpid), ports_(std::move(ports)), acct_(acct), cfg_(cfg),
      alive_(std::make_shared<bool>(true))
{
    fsm_.echo_interval = cfg_.echo_interval;
}

SimSwitch::~SimSwitch()
{
    *alive_ = false;
}

void SimSwitch::connect(std::shared_ptr<PipeEnd> link)
{
    link_ = std::move(link);
    decoder_ = {};
    fsm_ = ofwire::SessionFsm::for_peer(ofwire::PeerRole::Controller);
    fsm_.echo_interval = cfg_.echo_interval;
    std::weak_ptr<bool> alive = alive_;
    PipeEnd* self_link = link_.get();
    link_->set_receiver(
        [this, alive, self_link](ByteView b) {
            auto a = alive.lock();
            if (a && *a && link_.get() == self_link)
                control_bytes(b);
        },
        [this, alive, self_link] {
            auto a = alive.lock();
            if (a && *a && link_.get() == self_link) {
                link_.reset();
                fsm_.state = ofwire::SessionState::Disconnected;
            }
        });
    send_control(ofwire::make(next_xid_++, ofwire::Hello{}));
    if (!ticking_) {
        ticking_ = true;
        next_sample_ = sched_.now() + cfg_.sample_interval;
        auto fn = std::make_shared<std::function<void()>>();
        *fn = [this, alive, fn] {
            auto a = alive.lock();
            if (!a || !*a)
                return;
            tick();
            sched_.after(ofwire::kSchedulerTick, *fn);
        };
        sched_.after(ofwire::kSchedulerTick, *fn);
    }
}

void SimSwitch::disconnect()
{
    if (link_)
        link_->close();
    link_.reset();
    fsm_.state = ofwire::SessionState::Disconnected;
}

void SimSwitch::send_control(const OfMessage& m)
{
    if (link_)
        link_->send(ofwire::encode(m));
}

void SimSwitch::control_bytes(ByteView bytes)
{
    decoder_.feed(bytes);
    while (link_) {
        std::optional<ofwire::StreamDecoder::Item> item;
        try {
            item = decoder_.next();
        } catch (const Error&) {
            disconnect();
            return;
        }
        if (!item)
            return;
        if (control_hook_)
            control_hook_(item->msg, sched_.now());
        if (silenced_)
            continue;
        if (keep_log_)
            control_log_.push_back(item->raw);
        handle(item->msg);
    }
}

void SimSwitch::handle(const OfMessage& m)
{
    if (fsm_.state == ofwire::SessionState::Disconnected)
        return;
    auto res = ofwire::step(fsm_, ofwire::Received{m});
    fsm_ = res.fsm;
    for (auto& action : res.actions) {
        if (auto* send = std::get_if<ofwire::Send>(&action)) {
            send_control(send->msg);
        } else if (auto* d = std::get_if<ofwire::Deliver>(&action)) {
            const auto& msg = d->msg;
            if (msg.is<ofwire::FeaturesRequest>()) {
                send_control(ofwire::make(msg.xid, ofwire::FeaturesReply{dpid_, cfg_.n_buffers, 1}));
            } else if (msg.is<ofwire::FlowMod>()) {
                table_.apply(msg.as<ofwire::FlowMod>(), sched_.now());
                ++flow_mods_;
            } else if (msg.is<ofwire::PacketOut>()) {
                packet_out(msg.as<ofwire::PacketOut>());
            }
        } else {
            disconnect();
            return;
        }
    }
}

void SimSwitch::receive(std::uint32_t in_port, const Frame& f)
{
    const TimeUs now = sched_.now();
    auto& c = counters_[in_port];
    ++c.rx;
    c.rx_bytes += f.size;
    auto& ic = interval_[in_port];
    ++ic.rx;
    ic.rx_bytes += f.size;
    if (auto p = policers_.find(in_port); p != policers_.end() && !p->second.admit(now)) {
        ++acct_.dropped;
        return;
    }
    if (const FlowEntry* e = table_.hit(in_port, f, now)) {
        std::size_t n = emit(e->actions, in_port, f);
        if (n == 0)
            ++acct_.dropped;
        else
            acct_.copies += n - 1;
        return;
    }
    if (!link_ || fsm_.state != ofwire::SessionState::Established || silenced_) {
        ++acct_.dropped;
        return;
    }
    std::uint32_t buffer_id = ofwire::kNoBuffer;
    if (buffers_.size() < cfg_.n_buffers) {
        buffer_id = next_buffer_++;
        if (next_buffer_ == ofwire::kNoBuffer)
            next_buffer_ = 1;
        buffers_[buffer_id] = {f, now};
        ++acct_.buffered;
    } else {
        ++acct_.dropped;
    }
    ++packet_ins_;
    auto& k = pin_interval_[guard::FlowKey{in_port, f.ipv4_src, f.ipv4_dst}];
    ++k.first;
    k.second += f.size;
    send_control(ofwire::make(next_xid_++, ofwire::PacketIn{buffer_id, in_port, 0, encode_frame(f)}));
}

void SimSwitch::packet_out(const ofwire::PacketOut& po)
{
    if (po.buffer_id != ofwire::kNoBuffer) {
        auto it = buffers_.find(po.buffer_id);
        if (it != buffers_.end()) {
            Frame f = it->second.first;
            buffers_.erase(it);
            --acct_.buffered;
            std::size_t n = emit(po.actions, po.in_port, f);
            if (n == 0)
                ++acct_.dropped;
            else
                acct_.copies += n - 1;
            return;
        }
    }
    if (po.frame.empty())
        return;
    Frame f;
    try {
        f = decode_frame(po.frame);
    } catch (const Error&) {
        return;
    }
    // A frame built by the controller enters the data plane here.
    acct_.copies += emit(po.actions, po.in_port, f);
}

std::size_t SimSwitch::emit(const std::vector<ofwire::Action>& actions, std::uint32_t in_port, const Frame& f)
{
    std::size_t n = 0;
    for (const auto& a : actions) {
        if (a.out_port == ofwire::kPortFlood) {
            for (auto p : ports_)
                if (p != in_port) {
                    output(p, f);
                    ++n;
                }
        } else if (a.out_port != in_port && std::find(ports_.begin(), ports_.end(), a.out_port) != ports_.end()) {
            output(a.out_port, f);
            ++n;
        }
    }
    return n;
}

void SimSwitch::output(std::uint32_t port, const Frame& f)
{
    auto& c = counters_[port];
    ++c.tx;
    c.tx_bytes += f.size;
    auto& ic = interval_[port];
    ++ic.tx;
    ic.tx_bytes += f.size;
    ++acct_.in_flight;
    if (out_)
        out_(port, f);
}

void SimSwitch::set_rate_limit(std::uint32_t port, double pps)
{
    if (pps < 0)
        throw Error(Errc::InvalidArgument, "negative rate limit");
    if (std::find(ports_.begin(), ports_.end(), port) == ports_.end())
        throw Error(Errc::InvalidArgument, "no such port: " + std::to_string(port));
    Policer p;
    p.pps = pps;
    p.tokens = std::max(1.0, pps * 0.1);
    p.last = sched_.now();
    policers_[port] = p;
}

void SimSwitch::clear_rate_limit(std::uint32_t port)
{
    policers_.erase(port);
}

std::map<std::uint32_t, double> SimSwitch::rate_limits() const
{
    std::map<std::uint32_t, double> out;
    for (const auto& [port, p] : policers_)
        out[port] = p.pps;
    return out;
}

SimSwitch::Counters SimSwitch::port_counters(std::uint32_t port) const
{
    auto it = counters_.find(port);
    return it == counters_.end() ? Counters{} : it->second;
}

void SimSwitch::tick()
{
    const TimeUs now = sched_.now();
    if (link_ && !silenced_ && fsm_.state == ofwire::SessionState::Established) {
        auto res = ofwire::step(fsm_, ofwire::TimerTick{now});
        fsm_ = res.fsm;
        for (auto& a : res.actions) {
            if (auto* send = std::get_if<ofwire::Send>(&a))
                send_control(send->msg);
            else if (std::holds_alternative<ofwire::Disconnect>(a)) {
                disconnect();
                break;
            }
        }
    }
    table_.expire(now);
    while (!buffers_.empty() && now - buffers_.begin()->second.second >= cfg_.buffer_ttl) {
        buffers_.erase(buffers_.begin());
        --acct_.buffered;
        ++acct_.dropped;
    }
    if (now >= next_sample_) {
        flush_samples(now);
        next_sample_ = now + cfg_.sample_interval;
    }
}

void SimSwitch::flush_samples(TimeUs now)
{
    if (sink_) {
        for (const auto& [key, pb] : pin_interval_) {
            guard::TrafficSample s;
            s.switch_id = dpid_;
            s.port = key.in_port;
            s.kind = guard::SampleKind::PacketIn;
            s.packet_count = pb.first;
            s.byte_count = pb.second;
            s.flow = key;
            s.timestamp_us = now;
            sink_(s);
        }
        for (const auto& [port, c] : interval_) {
            if (c.rx) {
                guard::TrafficSample s{dpid_, port, guard::SampleKind::PortRx, c.rx_bytes, c.rx, std::nullopt, now};
                sink_(s);
            }
            if (c.tx) {
                guard::TrafficSample s{dpid_, port, guard::SampleKind::PortTx, c.tx_bytes, c.tx, std::nullopt, now};
                sink_(s);
            }
        }
    }
    pin_interval_.clear();
    interval_.clear();
}

} // namespace sdnchain::simnet
