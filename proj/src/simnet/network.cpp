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


#include "sdnchain/simnet/network.hpp"

#include "sdnchain/core/error.hpp"

namespace sdnchain::simnet {

Network::Network(Scheduler& sched, Topology topo, NetworkConfig cfg, std::uint64_t seed)
    : sched_(sched), topo_(std::move(topo)), cfg_(cfg), rng_(seed), alive_(std::make_shared<bool>(true)),
      host_rx_(topo_.host_count(), 0)
{
    for (std::size_t i = 0; i < topo_.switch_count(); ++i) {
        std::vector<std::uint32_t> ports;
        for (const auto& p : topo_.ports(i))
            ports.push_back(p.no);
        auto sw = std::make_unique<SimSwitch>(sched_, topo_.dpid(i), std::move(ports), acct_, cfg_.switch_config);
        sw->set_output([this, i](std::uint32_t port, const Frame& f) { deliver(i, port, f); });
        switches_.push_back(std::move(sw));
    }
}

Network::~Network()
{
    *alive_ = false;
}

SimSwitch* Network::by_dpid(DatapathId dpid)
{
    auto i = topo_.switch_index(dpid);
    return i ? switches_[*i].get() : nullptr;
}

void Network::attach(mw::Middleware& mw)
{
    for (auto& sw : switches_) {
        auto [sw_end, mw_end] = make_pipe(sched_, cfg_.control_delay);
        const mw::ConnId conn = mw.switch_connect(mw_end);
        mw_end->set_receiver([&mw, conn](ByteView b) { mw.switch_bytes(conn, b); },
                             [&mw, conn] { mw.switch_closed(conn); });
        sw->connect(sw_end);
    }
}

void Network::attach_direct(ReferenceController& c)
{
    for (auto& sw : switches_) {
        auto [sw_end, c_end] = make_pipe(sched_, cfg_.control_delay);
        c.accept(c_end);
        sw->connect(sw_end);
    }
}

Frame Network::frame(std::size_t src_host, std::size_t dst_host) const
{
    const auto& s = topo_.host(src_host);
    const auto& d = topo_.host(dst_host);
    return Frame{s.mac, d.mac, s.ip, d.ip, cfg_.frame_size};
}

void Network::send(std::size_t host, const Frame& f)
{
    const std::size_t sw = topo_.host_switch(host);
    const std::uint32_t port = topo_.host_port(host);
    ++acct_.injected;
    ++acct_.in_flight;
    link_bytes_[topo_.port(sw, port)->link_id] += f.size;
    std::weak_ptr<bool> alive = alive_;
    sched_.after(cfg_.data_delay, [this, alive, sw, port, f] {
        auto a = alive.lock();
        if (!a || !*a)
            return;
        --acct_.in_flight;
        switches_[sw]->receive(port, f);
    });
}

void Network::announce_hosts(TimeUs at, TimeUs gap)
{
    std::weak_ptr<bool> alive = alive_;
    for (std::size_t h = 0; h < topo_.host_count(); ++h) {
        sched_.at(at + static_cast<TimeUs>(h) * gap, [this, alive, h] {
            auto a = alive.lock();
            if (!a || !*a)
                return;
            const auto& s = topo_.host(h);
            send(h, Frame{s.mac, MacAddr{0xffffffffffffull}, s.ip, Ipv4Addr{0xffffffffu}, cfg_.frame_size});
        });
    }
}

void Network::deliver(std::size_t sw, std::uint32_t port, const Frame& f)
{
    const PortInfo* p = topo_.port(sw, port);
    link_bytes_[p->link_id] += f.size;
    std::weak_ptr<bool> alive = alive_;
    const PortKind kind = p->kind;
    const std::size_t peer = p->peer;
    const std::uint32_t peer_port = p->peer_port;
    sched_.after(cfg_.data_delay, [this, alive, kind, peer, peer_port, f] {
        auto a = alive.lock();
        if (!a || !*a)
            return;
        --acct_.in_flight;
        if (kind == PortKind::Host) {
            ++acct_.delivered;
            ++host_rx_[peer];
        } else {
            switches_[peer]->receive(peer_port, f);
        }
    });
}

void Network::start_flow(std::size_t src, std::size_t dst, double fps, TimeUs start, TimeUs stop)
{
    if (src >= topo_.host_count() || dst >= topo_.host_count())
        throw Error(Errc::InvalidArgument, "no such host");
    schedule_flow(src, frame(src, dst), fps, start, stop, false, {});
}

void Network::schedule_flow(std::size_t src, const Frame& base, double fps, TimeUs start, TimeUs stop, bool attack,
                            std::vector<Ipv4Addr> pool)
{
    if (fps <= 0 || stop <= start)
        return;
    const double period = 1e6 / fps;
    const double phase = std::uniform_real_distribution<double>(0.0, period)(rng_);
    struct State {
        std::uint64_t k = 0;
    };
    auto st = std::make_shared<State>();
    auto at = [start, phase, period](std::uint64_t k) {
        return start + static_cast<TimeUs>(phase + period * static_cast<double>(k));
    };
    std::weak_ptr<bool> alive = alive_;
    auto fn = std::make_shared<std::function<void()>>();
    *fn = [this, alive, fn, st, at, src, base, stop, attack, pool = std::move(pool)] {
        auto a = alive.lock();
        if (!a || !*a)
            return;
        const TimeUs now = sched_.now();
        if (now >= stop || (attack && now >= attack_stop_))
            return;
        Frame f = base;
        if (attack) {
            const std::uint64_t n = next_spoofed_mac_++;
            f.eth_src = MacAddr{0x020000000000ull | (n & 0xffffffffffull)};
            f.ipv4_src = pool.empty() ? Ipv4Addr{0x0a400000u | static_cast<std::uint32_t>(n & 0x3fffff)}
                                      : pool[st->k % pool.size()];
            ++attack_frames_;
        }
        send(src, f);
        ++st->k;
        sched_.at(at(st->k), *fn);
    };
    sched_.at(at(0), *fn);
}

std::vector<AttackPlan> Network::ddos_generate(const std::vector<Ipv4Addr>& victims, std::uint32_t spoofed_source_count,
                                               double rate, TimeUs start, TimeUs until,
                                               const std::set<std::size_t>& avoid_hosts)
{
    if (spoofed_source_count > 1000)
        throw Error(Errc::InvalidArgument, "at most 1000 spoofed sources per victim");
    std::vector<std::size_t> vh;
    for (auto ip : victims) {
        auto h = topo_.host_by_ip(ip);
        if (!h)
            throw Error(Errc::UnknownVictim, "no host with address " + ip.str());
        vh.push_back(*h);
    }
    std::vector<AttackPlan> plans;
    for (std::size_t vi = 0; vi < vh.size(); ++vi) {
        const std::size_t v = vh[vi];
        std::optional<std::size_t> pick, fallback;
        for (std::size_t h = 0; h < topo_.host_count(); ++h) {
            if (std::find(vh.begin(), vh.end(), h) != vh.end() || attackers_.count(h) ||
                topo_.host_switch(h) == topo_.host_switch(v))
                continue;
            if (!avoid_hosts.count(h)) {
                pick = h;
                break;
            }
            if (!fallback)
                fallback = h;
        }
        if (!pick)
            pick = fallback;
        if (!pick)
            throw Error(Errc::InvalidArgument, "no host left to attack " + topo_.host(v).ip.str() + " from");
        attackers_.insert(*pick);
        AttackPlan plan{v, *pick, rate, {}};
        for (std::uint32_t j = 0; j < spoofed_source_count; ++j)
            plan.spoofed.push_back(Ipv4Addr{0x0a420000u + static_cast<std::uint32_t>(vi) * 1024u + j + 1});
        Frame base = frame(*pick, v);
        schedule_flow(*pick, base, rate, start, until, true, plan.spoofed);
        plans.push_back(std::move(plan));
    }
    return plans;
}

void Network::set_sample_sink(SimSwitch::SampleSink sink)
{
    for (auto& sw : switches_)
        sw->set_sample_sink(sink);
}

bool Network::conserved() const
{
    return static_cast<std::int64_t>(acct_.injected + acct_.copies) ==
           static_cast<std::int64_t>(acct_.delivered + acct_.dropped) + acct_.in_flight + acct_.buffered;
}

std::uint64_t Network::link_bytes(const std::string& link_id) const
{
    auto it = link_bytes_.find(link_id);
    return it == link_bytes_.end() ? 0 : it->second;
}

} // namespace sdnchain::simnet
