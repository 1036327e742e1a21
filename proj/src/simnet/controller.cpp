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


#include "sdnchain/simnet/controller.hpp"

#include "sdnchain/core/error.hpp"
#include "sdnchain/ofwire/codec.hpp"

#include <algorithm>
#include <deque>

namespace sdnchain::simnet {

using ofwire::OfMessage;

ControllerFabric::ControllerFabric(const Topology& topo) : topo_(topo), flood_(topo.switch_count())
{
    std::vector<bool> seen(topo.switch_count(), false);
    std::deque<std::size_t> q{0};
    seen[0] = true;
    while (!q.empty()) {
        auto cur = q.front();
        q.pop_front();
        for (auto nb : topo.neighbors(cur)) {
            if (seen[nb])
                continue;
            seen[nb] = true;
            flood_[cur].push_back(topo.port_toward(cur, nb));
            flood_[nb].push_back(topo.port_toward(nb, cur));
            q.push_back(nb);
        }
    }
    for (std::size_t sw = 0; sw < topo.switch_count(); ++sw) {
        for (const auto& p : topo.ports(sw))
            if (p.kind == PortKind::Host)
                flood_[sw].push_back(p.no);
        std::sort(flood_[sw].begin(), flood_[sw].end());
    }
}

std::optional<ControllerFabric::Location> ControllerFabric::locate(MacAddr mac) const
{
    auto it = hosts_.find(mac.value);
    if (it == hosts_.end())
        return std::nullopt;
    return it->second;
}

void ControllerFabric::own(DatapathId dpid, ReferenceController* c, std::uint64_t channel)
{
    owners_[dpid] = {c, channel};
}

void ControllerFabric::disown(DatapathId dpid, const ReferenceController* c, std::uint64_t channel)
{
    auto it = owners_.find(dpid);
    if (it != owners_.end() && it->second.first == c && it->second.second == channel)
        owners_.erase(it);
}

bool ControllerFabric::send(DatapathId dpid, const OfMessage& m)
{
    auto it = owners_.find(dpid);
    if (it == owners_.end())
        return false;
    it->second.first->send(it->second.second, m);
    return true;
}

std::optional<std::string> ControllerFabric::owner(DatapathId dpid) const
{
    auto it = owners_.find(dpid);
    if (it == owners_.end())
        return std::nullopt;
    return it->second.first->id();
}

ReferenceController::ReferenceController(Scheduler& sched, std::shared_ptr<ControllerFabric> fabric,
                                         ControllerConfig cfg)
    : sched_(sched), fabric_(std::move(fabric)), cfg_(std::move(cfg)), alive_(std::make_shared<bool>(true)),
      queue_(cfg_.service_time)
{
    std::weak_ptr<bool> alive = alive_;
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

ReferenceController::~ReferenceController()
{
    *alive_ = false;
    for (auto& [id, ch] : chans_)
        if (ch.dpid)
            fabric_->disown(*ch.dpid, this, id);
}

void ReferenceController::set_upstream(UpBytes on_bytes, UpClosed on_closed)
{
    up_bytes_ = std::move(on_bytes);
    up_closed_ = std::move(on_closed);
}

std::shared_ptr<mw::Link> ReferenceController::open_channel(mw::ConnId id)
{
    if (chans_.count(id))
        return nullptr;
    auto [mine, theirs] = make_pipe(sched_, cfg_.channel_delay);
    std::weak_ptr<bool> alive = alive_;
    theirs->set_receiver(
        [this, alive, id](ByteView b) {
            auto a = alive.lock();
            if (a && *a && up_bytes_)
                up_bytes_(id, b);
        },
        [this, alive, id] {
            auto a = alive.lock();
            if (a && *a && up_closed_)
                up_closed_(id);
        });
    bind(id, mine);
    return theirs;
}

mw::ConnId ReferenceController::accept(std::shared_ptr<PipeEnd> end)
{
    const auto id = next_direct_++;
    bind(id, std::move(end));
    return id;
}

void ReferenceController::bind(std::uint64_t id, std::shared_ptr<PipeEnd> end)
{
    std::weak_ptr<bool> alive = alive_;
    end->set_receiver(
        [this, alive, id](ByteView b) {
            auto a = alive.lock();
            if (a && *a)
                on_bytes(id, b);
        },
        [this, alive, id] {
            auto a = alive.lock();
            if (a && *a)
                on_closed(id);
        });
    Chan ch;
    ch.end = std::move(end);
    ch.fsm.echo_interval = cfg_.echo_interval;
    chans_.emplace(id, std::move(ch));
}

void ReferenceController::shutdown()
{
    std::vector<std::uint64_t> ids;
    for (const auto& [id, ch] : chans_)
        ids.push_back(id);
    for (auto id : ids)
        close(id);
}

void ReferenceController::close(std::uint64_t id)
{
    auto it = chans_.find(id);
    if (it == chans_.end())
        return;
    auto end = it->second.end;
    if (it->second.dpid)
        fabric_->disown(*it->second.dpid, this, id);
    chans_.erase(it);
    end->close();
}

void ReferenceController::on_closed(std::uint64_t id)
{
    auto it = chans_.find(id);
    if (it == chans_.end())
        return;
    if (it->second.dpid)
        fabric_->disown(*it->second.dpid, this, id);
    chans_.erase(it);
}

void ReferenceController::send(std::uint64_t channel, const OfMessage& m)
{
    auto it = chans_.find(channel);
    if (it == chans_.end())
        return;
    if (m.is<ofwire::FlowMod>())
        ++flow_mods_;
    it->second.end->send(ofwire::encode(m));
}

void ReferenceController::on_bytes(std::uint64_t id, ByteView bytes)
{
    auto it = chans_.find(id);
    if (it == chans_.end())
        return;
    it->second.decoder.feed(bytes);
    while (true) {
        it = chans_.find(id);
        if (it == chans_.end())
            return;
        Chan& ch = it->second;
        std::optional<ofwire::StreamDecoder::Item> item;
        try {
            item = ch.decoder.next();
        } catch (const Error&) {
            close(id);
            return;
        }
        if (!item)
            return;
        if (keep_log_)
            log_.push_back(item->raw);
        auto res = ofwire::step(ch.fsm, ofwire::Received{item->msg});
        ch.fsm = res.fsm;
        for (auto& action : res.actions) {
            if (!chans_.count(id))
                return;
            if (auto* s = std::get_if<ofwire::Send>(&action)) {
                ch.end->send(ofwire::encode(s->msg));
            } else if (auto* d = std::get_if<ofwire::Deliver>(&action)) {
                if (d->msg.is<ofwire::FeaturesReply>()) {
                    ch.dpid = d->msg.as<ofwire::FeaturesReply>().datapath_id;
                    fabric_->own(*ch.dpid, this, id);
                } else if (d->msg.is<ofwire::PacketIn>() && ch.dpid) {
                    ++packet_ins_;
                    const TimeUs done = queue_.arrive(sched_.now());
                    std::weak_ptr<bool> alive = alive_;
                    sched_.at(done, [this, alive, dpid = *ch.dpid, pin = d->msg.as<ofwire::PacketIn>()] {
                        auto a = alive.lock();
                        if (a && *a)
                            process(dpid, pin);
                    });
                }
            } else {
                close(id);
                return;
            }
        }
    }
}

void ReferenceController::process(DatapathId dpid, const ofwire::PacketIn& pin)
{
    const Topology& topo = fabric_->topology();
    auto sw = topo.switch_index(dpid);
    if (!sw)
        return;
    Frame f;
    try {
        f = decode_frame(pin.frame);
    } catch (const Error&) {
        return;
    }
    const PortInfo* in = topo.port(*sw, pin.in_port);
    if (in && in->kind == PortKind::Host)
        fabric_->learn(f.eth_src, {*sw, pin.in_port});

    ofwire::PacketOut po;
    po.buffer_id = pin.buffer_id;
    po.in_port = pin.in_port;
    if (pin.buffer_id == ofwire::kNoBuffer)
        po.frame = pin.frame;

    auto dst = fabric_->locate(f.eth_dst);
    if (!dst) {
        for (auto p : fabric_->flood_ports(*sw))
            if (p != pin.in_port)
                po.actions.push_back({p});
        fabric_->send(dpid, ofwire::make(next_xid_++, std::move(po)));
        return;
    }
    auto path = topo.shortest_path(*sw, dst->sw);
    if (path.empty()) {
        fabric_->send(dpid, ofwire::make(next_xid_++, std::move(po))); // no actions: drop
        return;
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> hops; // (in_port, out_port) per switch on the path
    for (std::size_t i = 0; i < path.size(); ++i) {
        std::uint32_t hop_in = i == 0 ? pin.in_port : topo.port_toward(path[i], path[i - 1]);
        std::uint32_t hop_out = i + 1 == path.size() ? dst->port : topo.port_toward(path[i], path[i + 1]);
        hops.emplace_back(hop_in, hop_out);
    }
    // Downstream first so the released frame finds its entries in place.
    for (std::size_t i = path.size(); i-- > 0;) {
        ofwire::FlowMod fm;
        fm.cookie = 0x1;
        fm.match.in_port = hops[i].first;
        fm.match.eth_src = f.eth_src;
        fm.match.eth_dst = f.eth_dst;
        fm.priority = cfg_.priority;
        fm.idle_timeout = cfg_.idle_timeout;
        fm.actions = {{hops[i].second}};
        fabric_->send(topo.dpid(path[i]), ofwire::make(next_xid_++, std::move(fm)));
    }
    po.actions = {{hops[0].second}};
    fabric_->send(dpid, ofwire::make(next_xid_++, std::move(po)));
}

std::map<DatapathId, std::uint64_t> ReferenceController::switches() const
{
    std::map<DatapathId, std::uint64_t> out;
    for (const auto& [id, ch] : chans_)
        if (ch.dpid)
            out[*ch.dpid] = id;
    return out;
}

void ReferenceController::tick()
{
    const TimeUs now = sched_.now();
    std::vector<std::uint64_t> ids;
    for (const auto& [id, ch] : chans_)
        if (ch.fsm.state == ofwire::SessionState::Established)
            ids.push_back(id);
    for (auto id : ids) {
        auto it = chans_.find(id);
        if (it == chans_.end())
            continue;
        auto res = ofwire::step(it->second.fsm, ofwire::TimerTick{now});
        it->second.fsm = res.fsm;
        for (auto& a : res.actions) {
            if (auto* s = std::get_if<ofwire::Send>(&a)) {
                it->second.end->send(ofwire::encode(s->msg));
            } else if (std::holds_alternative<ofwire::Disconnect>(a)) {
                close(id);
                break;
            }
        }
    }
}

} // namespace sdnchain::simnet
