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


#include "sdnchain/core/error.hpp"
#include "sdnchain/simnet/network.hpp"

#include "../support/generators.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

using namespace sdnchain;
using namespace sdnchain::simnet;

namespace {

TopologySpec line2()
{
    TopologySpec t;
    t.name = "line2";
    t.switches = {{"s1", 1}, {"s2", 2}};
    t.links = {{"s1", "s2", 1000}};
    t.hosts = {{"h1", MacAddr{1}, Ipv4Addr{0x0a000001}, "s1"}, {"h2", MacAddr{2}, Ipv4Addr{0x0a000002}, "s2"}};
    return t;
}

struct DirectNet {
    Scheduler sched;
    Network net;
    std::shared_ptr<ControllerFabric> fabric;
    std::shared_ptr<ReferenceController> ctrl;

    explicit DirectNet(TopologySpec spec, std::uint64_t seed = 1)
        : net(sched, Topology(std::move(spec)), {}, seed),
          fabric(std::make_shared<ControllerFabric>(net.topology())),
          ctrl(std::make_shared<ReferenceController>(sched, fabric))
    {
        net.attach_direct(*ctrl);
        sched.run_for(500 * kMs);
    }
};

} // namespace

TEST_CASE("flow table lookup equals the linear scan")
{
    testing::Rng rng(7);
    for (int round = 0; round < 400; ++round) {
        FlowTable table;
        const auto n_mods = testing::uniform(rng, 0, 40);
        for (std::uint64_t i = 0; i < n_mods; ++i)
            table.apply(testing::random_table_mod(rng), static_cast<TimeUs>(i));
        auto entries = table.entries();
        for (int q = 0; q < 25; ++q) {
            auto port = static_cast<std::uint32_t>(testing::uniform(rng, 1, 4));
            auto f = testing::random_frame(rng);
            const FlowEntry* fast = table.lookup(port, f);
            const FlowEntry* slow = lookup_linear(entries, port, f);
            REQUIRE((fast == nullptr) == (slow == nullptr));
            if (fast)
                CHECK(fast->seq == slow->seq);
        }
    }
}

TEST_CASE("flow table add replaces, modify rewrites, delete removes")
{
    FlowTable t;
    ofwire::FlowMod fm;
    fm.match.eth_dst = MacAddr{5};
    fm.priority = 3;
    fm.actions = {{1}};
    t.apply(fm, 0);
    t.apply(fm, 1);
    CHECK(t.size() == 1);
    fm.command = ofwire::FlowModCommand::Modify;
    fm.actions = {{2}};
    t.apply(fm, 2);
    Frame f{MacAddr{9}, MacAddr{5}, {}, {}, 64};
    REQUIRE(t.lookup(1, f));
    CHECK(t.lookup(1, f)->actions[0].out_port == 2);
    fm.command = ofwire::FlowModCommand::Delete;
    t.apply(fm, 3);
    CHECK(t.size() == 0);
    CHECK(t.lookup(1, f) == nullptr);
}

TEST_CASE("idle entries expire")
{
    FlowTable t;
    ofwire::FlowMod fm;
    fm.priority = 1;
    fm.idle_timeout = 5;
    t.apply(fm, 0);
    Frame f{};
    t.hit(1, f, 3 * kSec);
    CHECK(t.expire(7 * kSec) == 0);
    CHECK(t.expire(8 * kSec) == 1);
}

TEST_CASE("topology defaults, numbering and validation")
{
    Topology t(default_topology());
    CHECK(t.switch_count() == 6);
    CHECK(t.host_count() == 25);
    // s1 links: s1-s2, s6-s1, s1-s4 then hosts h1, h7, h13, h19, h25.
    CHECK(t.ports(0).size() == 8);
    CHECK(t.port(0, 1)->link_id == "s1-s2");
    CHECK(t.port(0, 3)->link_id == "s1-s4");
    CHECK(t.port(0, 4)->kind == PortKind::Host);
    CHECK(t.host_port(0) == 4);
    CHECK(t.link_ids().size() == 7 + 25);

    auto dup = default_topology();
    dup.switches[3].dpid = 1;
    CHECK_THROWS_WITH_AS(Topology{dup}, doctest::Contains("DuplicateDatapathId"), Error);
    auto split = default_topology();
    split.links = {{"s1", "s2", 1000}};
    CHECK_THROWS_AS(Topology{split}, Error);
    auto same_ip = default_topology();
    same_ip.hosts[1].ip = same_ip.hosts[0].ip;
    CHECK_THROWS_AS(Topology{same_ip}, Error);

    auto j = to_json(default_topology());
    auto back = topology_from_json(j);
    CHECK(to_json(back) == j);
}

TEST_CASE("shortest paths equal brute force, with and without an excluded switch")
{
    Topology t(default_topology());
    for (std::size_t ex = 0; ex <= t.switch_count(); ++ex) {
        std::set<std::size_t> excluded;
        if (ex < t.switch_count())
            excluded.insert(ex);
        for (std::size_t a = 0; a < t.switch_count(); ++a)
            for (std::size_t b = 0; b < t.switch_count(); ++b)
                CHECK(t.shortest_path(a, b, excluded) == testing::brute_force_path(t, a, b, excluded));
    }
}

TEST_CASE("learning controller on a two-switch line")
{
    DirectNet d(line2());
    auto& s1 = d.net.switch_at(0);
    auto& s2 = d.net.switch_at(1);
    REQUIRE(s1.session_state() == ofwire::SessionState::Established);
    REQUIRE(s2.session_state() == ofwire::SessionState::Established);

    // First frame: flood toward the unknown h2, learn h1, no entries.
    d.net.send(0, d.net.frame(0, 1));
    d.sched.run_for(100 * kMs);
    CHECK(d.net.host_rx(1) == 1);
    CHECK(d.ctrl->packet_ins() == 2);
    CHECK(d.ctrl->flow_mods_sent() == 0);
    CHECK(s1.table().size() == 0);
    CHECK(s2.table().size() == 0);

    // Reply: h1 is known, so both hops get an entry and the frame is released.
    d.net.send(1, d.net.frame(1, 0));
    d.sched.run_for(100 * kMs);
    CHECK(d.net.host_rx(0) == 1);
    CHECK(d.ctrl->packet_ins() == 3);
    CHECK(d.ctrl->flow_mods_sent() == 2);
    REQUIRE(s1.table().size() == 1);
    REQUIRE(s2.table().size() == 1);
    auto e1 = s1.table().entries()[0];
    CHECK(e1.match.in_port == 1u);
    CHECK(e1.match.eth_src == MacAddr{2});
    CHECK(e1.match.eth_dst == MacAddr{1});
    CHECK(e1.priority == 10);
    CHECK(e1.idle_timeout == 5);
    CHECK(e1.actions == std::vector<ofwire::Action>{{2}});
    auto e2 = s2.table().entries()[0];
    CHECK(e2.match.in_port == 2u);
    CHECK(e2.actions == std::vector<ofwire::Action>{{1}});

    // Same direction again: switched in the data plane.
    d.net.send(1, d.net.frame(1, 0));
    d.sched.run_for(100 * kMs);
    CHECK(d.net.host_rx(0) == 2);
    CHECK(d.ctrl->packet_ins() == 3);
    CHECK(d.net.conserved());
}

TEST_CASE("unknown destination floods without entries")
{
    DirectNet d(default_topology());
    Frame f = d.net.frame(0, 1);
    f.eth_dst = MacAddr{0x999};
    d.net.send(0, f);
    d.sched.run_for(200 * kMs);
    CHECK(d.ctrl->flow_mods_sent() == 0);
    // Reaches every other host exactly once over the tree.
    std::uint64_t rx = 0;
    for (std::size_t h = 0; h < 25; ++h)
        rx += d.net.host_rx(h);
    CHECK(rx == 24);
    CHECK(d.net.host_rx(0) == 0);
    CHECK(d.net.conserved());
    CHECK(d.net.accounting().in_flight == 0);
}

TEST_CASE("ddos generator: victims, rates and packet_in production")
{
    DirectNet d(default_topology());
    CHECK_THROWS_WITH_AS(d.net.ddos_generate({Ipv4Addr::parse("10.9.9.9")}, 10, 500, kSec, 2 * kSec),
                         doctest::Contains("UnknownVictim"), Error);

    DirectNet z(default_topology());
    z.net.ddos_generate({Ipv4Addr::parse("10.0.0.9")}, 10, 0, kSec, 5 * kSec);
    z.sched.run_for(5 * kSec);
    CHECK(z.net.attack_frames() == 0);

    // Victim location is known before the flood, as with background traffic.
    d.net.send(8, d.net.frame(8, 0));
    d.sched.run_for(200 * kMs);
    auto plans = d.net.ddos_generate({Ipv4Addr::parse("10.0.0.9")}, 20, 500, kSec, 3 * kSec);
    REQUIRE(plans.size() == 1);
    CHECK(d.net.topology().host_switch(plans[0].attacker) != d.net.topology().host_switch(plans[0].victim));
    d.sched.run_until(1500 * kMs);
    auto before = d.ctrl->packet_ins();
    d.sched.run_until(2500 * kMs);
    CHECK(d.ctrl->packet_ins() - before >= 500);
    d.sched.run_until(4 * kSec);
    CHECK(d.net.attack_frames() == 1000);
    CHECK(d.net.host_rx(8) >= 990);
    CHECK(d.net.conserved());
}

TEST_CASE("drop entries on offending sources stop their packet_ins")
{
    DirectNet d(default_topology());
    d.net.send(8, d.net.frame(8, 0));
    d.sched.run_for(200 * kMs);
    auto plans = d.net.ddos_generate({Ipv4Addr::parse("10.0.0.9")}, 20, 500, kSec, 10 * kSec);
    d.sched.run_until(2 * kSec);
    auto& sw = d.net.switch_at(d.net.topology().host_switch(plans[0].attacker));
    ofwire::FlowMod drop;
    drop.priority = 1000;
    for (auto src : plans[0].spoofed) {
        drop.match.ipv4_src = ofwire::Ipv4Prefix{src, 32};
        d.fabric->send(sw.dpid(), ofwire::make(7, drop));
    }
    d.sched.run_until(2100 * kMs);
    auto before = d.ctrl->packet_ins();
    d.sched.run_until(4 * kSec);
    CHECK(d.ctrl->packet_ins() == before);
    CHECK(d.net.conserved());
}

TEST_CASE("conservation holds throughout a loaded run and runs are deterministic")
{
    auto run = [](std::uint64_t seed) {
        DirectNet d(default_topology(), seed);
        for (std::size_t p = 0; p < 5; ++p) {
            d.net.start_flow(p, 20 - p, 10, 0, 6 * kSec);
            d.net.start_flow(20 - p, p, 10, 0, 6 * kSec);
        }
        d.net.ddos_generate({Ipv4Addr::parse("10.0.0.9"), Ipv4Addr::parse("10.0.0.14")}, 20, 500, 2 * kSec,
                            6 * kSec);
        std::vector<std::uint64_t> sig;
        for (int i = 0; i < 60; ++i) {
            d.sched.run_for(100 * kMs);
            REQUIRE(d.net.conserved());
        }
        const auto& a = d.net.accounting();
        sig = {a.injected, a.copies, a.delivered, a.dropped, d.ctrl->packet_ins(), d.ctrl->flow_mods_sent()};
        return sig;
    };
    auto a = run(3);
    CHECK(a == run(3));
    CHECK(a != run(4));
}

TEST_CASE("port policer admits its rate")
{
    Policer p;
    p.pps = 50;
    p.tokens = 5;
    int admitted = 0;
    for (TimeUs t = 0; t < 10 * kSec; t += kMs)
        admitted += p.admit(t);
    CHECK(admitted >= 500);
    CHECK(admitted <= 506);
}
