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
#include "sdnchain/simnet/testbed.hpp"

#include "../support/scripted.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace sdnchain;
using namespace sdnchain::simnet;
using testing::ScriptedController;
using testing::ScriptedSwitch;

namespace {

chain::ClusterOptions fast_chain()
{
    chain::ClusterOptions o;
    o.config.n_nodes = 4;
    o.config.link_delay = 2 * kMs;
    o.config.batch_timeout = 5 * kMs;
    return o;
}

std::vector<chain::Transaction> txs_of(const chain::ChainService& svc, chain::TxKind kind)
{
    std::vector<chain::Transaction> out;
    for (const auto& b : svc.ledger().blocks())
        for (const auto& tx : b->txs)
            if (tx.kind == kind)
                out.push_back(tx);
    return out;
}

std::vector<Bytes> without_echo(const std::vector<testing::LoggedMsg>& log)
{
    std::vector<Bytes> out;
    for (const auto& m : log)
        if (!m.msg.is<ofwire::EchoRequest>() && !m.msg.is<ofwire::EchoReply>())
            out.push_back(m.raw);
    return out;
}

struct ExchangeRun {
    std::vector<Bytes> at_switch;
    std::vector<Bytes> at_controller;
    std::size_t snapshots = 0;
    std::vector<mw::SnapshotRecord> records;
};

// The scripted exchange over one switch session, either through the middleware
// or on a direct pipe.
ExchangeRun run_exchange(bool via_middleware)
{
    Scheduler sched;
    chain::ChainService svc(sched, fast_chain());
    mw::Middleware m(sched, svc, {});
    auto ctrl = std::make_shared<ScriptedController>(sched, 100);
    ScriptedSwitch sw(sched, 0x42);
    if (via_middleware) {
        m.start();
        svc.register_element("c1", chain::Role::Controller, "k", "c1");
        sched.run_for(kSec);
        ctrl->up_bytes = [&m](mw::ConnId id, ByteView b) { m.controller_bytes(id, b); };
        REQUIRE(m.controller_connect("c1", ctrl).outcome == mw::ConnectOutcome::Accepted);
        auto [a, b] = make_pipe(sched, 100);
        auto conn = m.switch_connect(b);
        b->set_receiver([&m, conn](ByteView x) { m.switch_bytes(conn, x); });
        sw.connect(a);
    } else {
        sched.run_for(kSec);
        auto [a, b] = make_pipe(sched, 100);
        ctrl->accept(b);
        sw.connect(a);
    }
    sched.run_until(2 * kSec);
    REQUIRE(ctrl->established());
    auto script = testing::scripted_exchange();
    for (std::size_t i = 0; i < script.size(); ++i) {
        sched.run_until(2 * kSec + static_cast<TimeUs>(i) * 5 * kMs);
        if (script[i].first)
            sw.send(script[i].second);
        else
            ctrl->send(script[i].second);
    }
    sched.run_until(8 * kSec);
    ExchangeRun r;
    r.at_switch = without_echo(sw.log);
    r.at_controller = without_echo(ctrl->log);
    auto snaps = txs_of(svc, chain::TxKind::Snapshot);
    r.snapshots = snaps.size();
    for (const auto& tx : snaps)
        r.records.push_back(mw::decode_snapshot(tx.payload));
    return r;
}

} // namespace

TEST_CASE("scripted exchange is byte-identical through the middleware and fully snapshotted")
{
    auto direct = run_exchange(false);
    auto proxied = run_exchange(true);
    REQUIRE(direct.at_controller.size() == 2 + 100);
    REQUIRE(direct.at_switch.size() == 2 + 100);
    CHECK(proxied.at_controller == direct.at_controller);
    CHECK(proxied.at_switch == direct.at_switch);
    CHECK(direct.snapshots == 0);
    CHECK(proxied.snapshots == 200);

    // Snapshot payloads carry the forwarded bytes in order per direction.
    std::vector<Bytes> up, down;
    for (const auto& rec : proxied.records) {
        CHECK(rec.switch_id == 0x42);
        CHECK(rec.controller_id == "c1");
        (rec.direction == mw::Direction::SwitchToCtrl ? up : down).push_back(rec.bytes);
    }
    CHECK(up == std::vector<Bytes>(direct.at_controller.begin() + 2, direct.at_controller.end()));
    CHECK(down == std::vector<Bytes>(direct.at_switch.begin() + 2, direct.at_switch.end()));
}

TEST_CASE("snapshot payload round trip, tags and malformed input")
{
    mw::SnapshotRecord r{Bytes{1, 2, 3}, mw::Direction::CtrlToSwitch, 7, "c2", 1234, "flow_table"};
    CHECK(mw::decode_snapshot(mw::encode_snapshot(r)) == r);
    CHECK_THROWS_WITH_AS(mw::decode_snapshot(to_bytes("{}")), doctest::Contains("Malformed"), Error);
    CHECK_THROWS_AS(mw::decode_snapshot(to_bytes("not json")), Error);
    CHECK(mw::snapshot_tag(ofwire::make(1, ofwire::FeaturesReply{})) == "port_info");
    CHECK(mw::snapshot_tag(ofwire::make(1, ofwire::PacketIn{0, 1, 0, Bytes{1}})) == "transmission_rate");
    CHECK(mw::snapshot_tag(ofwire::make(1, ofwire::FlowMod{})) == "flow_table");
    CHECK(mw::snapshot_tag(ofwire::make(1, ofwire::EchoRequest{})) == "control");
    CHECK(mw::switch_element_id(0x1f) == "of:000000000000001f");
    CHECK(mw::parse_switch_element_id("of:000000000000001f") == DatapathId{0x1f});
    CHECK_FALSE(mw::parse_switch_element_id("of:xyz"));
}

TEST_CASE("capture policies")
{
    mw::CapturePolicy all;
    mw::CapturePolicy ctl{mw::CaptureMode::ControlOnly, 10};
    mw::CapturePolicy sampled{mw::CaptureMode::Sampled, 4};
    auto pin = ofwire::make(1, ofwire::PacketIn{0, 1, 0, Bytes{1}});
    auto fm = ofwire::make(1, ofwire::FlowMod{});
    CHECK(all.captures(pin, 3));
    CHECK_FALSE(ctl.captures(pin, 0));
    CHECK(ctl.captures(fm, 1));
    int n = 0;
    for (int i = 0; i < 100; ++i)
        n += sampled.captures(pin, static_cast<std::uint64_t>(i));
    CHECK(n == 25);
    CHECK(mw::parse_capture_mode("control-only") == mw::CaptureMode::ControlOnly);
    CHECK_THROWS_AS(mw::parse_capture_mode("some"), Error);
}

TEST_CASE("switches register on chain with their handshake and get mapped")
{
    TestbedConfig cfg;
    cfg.chain = fast_chain();
    Testbed tb(cfg);
    REQUIRE(tb.build());
    for (std::size_t i = 0; i < tb.net().switch_count(); ++i) {
        auto eid = mw::switch_element_id(tb.net().topology().dpid(i));
        const auto* rec = tb.chain().ledger().registry().find(eid);
        REQUIRE(rec);
        CHECK(rec->role == chain::Role::Switch);
        auto info = nlohmann::json::parse(to_string(rec->pubinfo));
        CHECK(info.contains("hello"));
        CHECK(info.contains("features_reply"));
    }
    // Least-loaded placement alternates between the two controllers.
    std::map<std::string, int> load;
    for (const auto& [dpid, c] : tb.mw().mapping())
        ++load[c];
    CHECK(load["c1"] == 3);
    CHECK(load["c2"] == 3);
    CHECK(tb.chain().ledger().registry().header_meta().switch_count == 6);
}

TEST_CASE("access control: unregistered, registered, evicted")
{
    TestbedConfig cfg;
    cfg.chain = fast_chain();
    Testbed tb(cfg);
    REQUIRE(tb.build());
    std::vector<mw::MwEvent> events;
    tb.mw().on_event([&](const mw::MwEvent& e) { events.push_back(e); });

    auto rogue = tb.add_controller("c9");
    auto r = tb.connect("c9");
    CHECK(r.outcome == mw::ConnectOutcome::Rejected);
    CHECK(r.reason == Errc::NotRegistered);

    // Background traffic so forwarding happens on every controller.
    for (std::size_t h = 0; h < 6; ++h)
        tb.net().start_flow(h, (h + 3) % 25, 20, tb.sched().now(), tb.sched().now() + 10 * kSec);
    tb.sched().run_for(2 * kSec);

    std::vector<mw::ForwardRecord> fwd;
    tb.mw().on_forward([&](const mw::ForwardRecord& f) { fwd.push_back(f); });
    const TimeUs evict_at = tb.sched().now();
    tb.mw().evict("c1", "operator");
    for (const auto& [dpid, c] : tb.mw().mapping())
        CHECK(c == "c2");
    CHECK(tb.mw().mapping().size() == 6);
    tb.sched().run_for(3 * kSec);
    CHECK(tb.chain().ledger().registry().is_evicted("c1"));
    std::size_t from_c1 = 0;
    for (const auto& f : fwd)
        from_c1 += f.controller_id == "c1" && f.at >= evict_at;
    CHECK(from_c1 == 0);
    CHECK(!fwd.empty());
    CHECK(tb.controller("c1").channel_count() == 0);

    auto again = tb.connect("c1");
    CHECK(again.outcome == mw::ConnectOutcome::Rejected);
    CHECK(again.reason == Errc::Evicted);
    CHECK_THROWS_WITH_AS(tb.mw().evict("nobody", "x"), doctest::Contains("UnknownElement"), Error);
    bool gone = false;
    for (const auto& e : events)
        gone |= e.kind == mw::MwEvent::Kind::ControllerGone && e.element == "c1";
    CHECK(gone);
}

TEST_CASE("open enrollment admits a controller after its Register commits")
{
    TestbedConfig cfg;
    cfg.chain = fast_chain();
    cfg.middleware.open_enrollment = true;
    cfg.controllers = {"c1"};
    Testbed tb(cfg);
    REQUIRE(tb.build());
    tb.add_controller("c3");
    CHECK(tb.connect("c3").outcome == mw::ConnectOutcome::Enrolling);
    tb.sched().run_for(kSec);
    CHECK(tb.chain().is_registered("c3"));
    auto ids = tb.mw().controllers();
    CHECK(std::find(ids.begin(), ids.end(), "c3") != ids.end());
}

TEST_CASE("remap moves a switch and snapshots the mapping; same target is a no-op")
{
    TestbedConfig cfg;
    cfg.chain = fast_chain();
    Testbed tb(cfg);
    REQUIRE(tb.build());
    std::vector<mw::MwEvent> events;
    tb.mw().on_event([&](const mw::MwEvent& e) { events.push_back(e); });
    const DatapathId dpid = 1;
    const std::string from = tb.mw().mapping().at(dpid);
    const std::string to = from == "c1" ? "c2" : "c1";
    tb.mw().remap(dpid, to);
    CHECK(tb.mw().mapping().at(dpid) == to);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == mw::MwEvent::Kind::MappingChanged);
    CHECK(events[0].from_controller == from);
    CHECK(events[0].to_controller == to);
    tb.mw().remap(dpid, to);
    CHECK(events.size() == 1);

    tb.sched().run_for(kSec);
    CHECK(tb.fabric().owner(dpid) == to);
    bool mapping_snapshot = false;
    for (const auto& tx : txs_of(tb.chain(), chain::TxKind::Snapshot))
        mapping_snapshot |= mw::decode_snapshot(tx.payload).tag == "mapping";
    CHECK(mapping_snapshot);

    // Traffic through the remapped switch still flows.
    tb.net().start_flow(0, 1, 10, tb.sched().now(), tb.sched().now() + kSec);
    tb.net().start_flow(1, 0, 10, tb.sched().now(), tb.sched().now() + kSec);
    tb.sched().run_for(2 * kSec);
    CHECK(tb.net().host_rx(1) >= 9);
    CHECK(tb.net().host_rx(0) >= 9);

    CHECK_THROWS_WITH_AS(tb.mw().remap(dpid, "ghost"), doctest::Contains("UnknownElement"), Error);
    CHECK_THROWS_WITH_AS(tb.mw().remap(99, "c1"), doctest::Contains("UnknownElement"), Error);
    tb.register_controller("c5");
    tb.sched().run_for(kSec);
    CHECK_THROWS_WITH_AS(tb.mw().remap(dpid, "c5"), doctest::Contains("NotFound"), Error);
}

TEST_CASE("pending buffer keeps the newest 256 messages until a controller is ready")
{
    Scheduler sched;
    chain::ChainService svc(sched, fast_chain());
    mw::Middleware m(sched, svc, {});
    m.start();
    ScriptedSwitch sw(sched, 5);
    auto [a, b] = make_pipe(sched, 100);
    auto conn = m.switch_connect(b);
    b->set_receiver([&m, conn](ByteView x) { m.switch_bytes(conn, x); });
    sw.connect(a);
    sched.run_for(kSec);
    CHECK(m.pending_switches() == std::vector<DatapathId>{5});
    for (std::uint32_t i = 0; i < 300; ++i)
        sw.send(ofwire::make(i, ofwire::PacketIn{i, 1, 0, Bytes{1, 2, 3}}));
    sched.run_for(kSec);
    CHECK(m.buffered(5) == 256);
    CHECK(m.dropped() == 44);

    auto ctrl = std::make_shared<ScriptedController>(sched, 100);
    ctrl->up_bytes = [&m](mw::ConnId id, ByteView x) { m.controller_bytes(id, x); };
    svc.register_element("c1", chain::Role::Controller, "k", "c1");
    sched.run_for(kSec);
    CHECK(m.controller_connect("c1", ctrl).outcome == mw::ConnectOutcome::Accepted);
    sched.run_for(kSec);
    CHECK(m.buffered(5) == 0);
    std::vector<std::uint32_t> xids;
    for (const auto& l : ctrl->log)
        if (l.msg.is<ofwire::PacketIn>())
            xids.push_back(l.msg.xid);
    REQUIRE(xids.size() == 256);
    for (std::uint32_t i = 0; i < 256; ++i)
        CHECK(xids[i] == 44 + i);
}

TEST_CASE("handshake timeout closes a switch that never sends FeaturesReply")
{
    Scheduler sched;
    chain::ChainService svc(sched, fast_chain());
    mw::Middleware m(sched, svc, {});
    m.start();
    ScriptedSwitch sw(sched, 5);
    sw.mute = true;
    auto [a, b] = make_pipe(sched, 100);
    auto conn = m.switch_connect(b);
    b->set_receiver([&m, conn](ByteView x) { m.switch_bytes(conn, x); });
    sw.connect(a);
    sched.run_for(9900 * kMs);
    CHECK_FALSE(sw.closed);
    sched.run_for(500 * kMs);
    CHECK(sw.closed);
}

TEST_CASE("a silenced switch is disconnected 15 s after its first unanswered echo")
{
    TestbedConfig cfg;
    cfg.chain = fast_chain();
    Testbed tb(cfg);
    REQUIRE(tb.build());
    tb.sched().run_for(1234 * kMs);
    auto& sw = tb.net().switch_at(2);
    const std::string eid = mw::switch_element_id(sw.dpid());
    TimeUs first_unanswered = -1, closed_at = -1;
    sw.on_control([&](const ofwire::OfMessage& msg, TimeUs at) {
        if (msg.is<ofwire::EchoRequest>() && first_unanswered < 0)
            first_unanswered = at;
    });
    tb.mw().on_event([&](const mw::MwEvent& e) {
        if (e.kind == mw::MwEvent::Kind::SwitchClosed && e.element == eid && closed_at < 0)
            closed_at = tb.sched().now();
    });
    sw.silence(true);
    tb.sched().run_for(30 * kSec);
    REQUIRE(first_unanswered >= 0);
    REQUIRE(closed_at >= 0);
    // The request left the middleware one pipe delay before the switch saw it.
    const double gap = to_seconds(closed_at - (first_unanswered - tb.config().network.control_delay));
    CHECK(gap == doctest::Approx(15.0).epsilon(0.2 / 15));
}

TEST_CASE("evicting a switch closes its session and keeps it out")
{
    TestbedConfig cfg;
    cfg.chain = fast_chain();
    Testbed tb(cfg);
    REQUIRE(tb.build());
    const std::string eid = mw::switch_element_id(3);
    tb.mw().evict(eid, "compromised");
    tb.sched().run_for(kSec);
    CHECK(tb.mw().mapping().count(3) == 0);
    CHECK_FALSE(tb.net().switch_at(2).connected());
    CHECK(tb.chain().ledger().registry().is_evicted(eid));
    CHECK_THROWS_WITH_AS(tb.mw().install(3, ofwire::make(0, ofwire::FlowMod{})), doctest::Contains("Evicted"), Error);

    auto [a, b] = make_pipe(tb.sched(), 100);
    auto conn = tb.mw().switch_connect(b);
    mw::Middleware* m = &tb.mw();
    b->set_receiver([m, conn](ByteView x) { m->switch_bytes(conn, x); });
    ScriptedSwitch again(tb.sched(), 3);
    again.connect(a);
    tb.sched().run_for(kSec);
    CHECK(again.closed);
}
