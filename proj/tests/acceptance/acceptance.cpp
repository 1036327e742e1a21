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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "sdnchain/chain/ledger.hpp"
#include "sdnchain/core/error.hpp"
#include "sdnchain/parallel/kernels.hpp"
#include "sdnchain/scenario/runner.hpp"
#include "sdnchain/simnet/testbed.hpp"

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "../support/recalc_oracle.hpp"
#include "../support/scripted.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <sstream>

using namespace sdnchain;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using WallClock = std::chrono::steady_clock;

double seconds_since(WallClock::time_point t0)
{
    return std::chrono::duration<double>(WallClock::now() - t0).count();
}

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---- 1, 2: consensus latency sweep

struct Sweep {
    std::vector<parallel::SweepPoint> points;
    double wall_s = 0;
};

const std::vector<std::uint32_t> kNs{7, 19, 31};
const std::vector<TimeUs> kDelays{10 * kMs, 20 * kMs, 50 * kMs, 100 * kMs};

const Sweep& sweep()
{
    static Sweep s = [] {
        Sweep out;
        auto t0 = WallClock::now();
        auto cells = parallel::sweep_grid({chain::Algorithm::Pbft, chain::Algorithm::Rpbft}, kNs, kDelays);
        out.points = parallel::consensus_sweep(cells, 50, 1);
        out.wall_s = seconds_since(t0);
        return out;
    }();
    return s;
}

double mean_at(chain::Algorithm a, std::uint32_t n, TimeUs d)
{
    for (const auto& p : sweep().points)
        if (p.cell.algorithm == a && p.cell.n_nodes == n && p.cell.link_delay == d)
            return p.stats.mean_ms;
    throw Error(Errc::NotFound, "cell missing");
}

Outcome consensus_ordering()
{
    const auto& s = sweep();
    TimeUs virt = 0;
    double latency_sum_ms = 0;
    for (const auto& p : s.points) {
        virt += p.stats.virtual_time;
        for (double ms : p.stats.per_round_ms)
            latency_sum_ms += ms;
    }
    bool ok = true;
    std::string detail;
    for (auto alg : {chain::Algorithm::Pbft, chain::Algorithm::Rpbft}) {
        // A cell holds on an axis when it is the first along that axis or its
        // mean exceeds the previous cell's.
        int by_delay = 0, by_n = 0;
        for (std::size_t i = 0; i < kNs.size(); ++i)
            for (std::size_t j = 0; j < kDelays.size(); ++j) {
                const double m = mean_at(alg, kNs[i], kDelays[j]);
                by_delay += j == 0 || m > mean_at(alg, kNs[i], kDelays[j - 1]);
                by_n += i == 0 || m > mean_at(alg, kNs[i - 1], kDelays[j]);
            }
        ok = ok && by_delay >= 11 && by_n >= 11;
        detail += std::string(chain::to_string(alg)) + " delay-axis " + std::to_string(by_delay) + "/12, n-axis " +
                  std::to_string(by_n) + "/12; ";
    }
    const bool fast = to_seconds(virt) < 120;
    detail += "virtual time " + fmt("%.1f s", to_seconds(virt)) + " (round latencies alone " +
              fmt("%.1f s", latency_sum_ms / 1000) + ", limit 120 s), wall " + fmt("%.1f s", s.wall_s);
    return {ok && fast, detail};
}

Outcome algorithm_gap()
{
    using chain::Algorithm;
    const double p7 = mean_at(Algorithm::Pbft, 7, 20 * kMs), r7 = mean_at(Algorithm::Rpbft, 7, 20 * kMs);
    const double p31 = mean_at(Algorithm::Pbft, 31, 20 * kMs), r31 = mean_at(Algorithm::Rpbft, 31, 20 * kMs);
    const double ratio7 = r7 / p7, ratio31 = r31 / p31;
    return {p7 < r7 && ratio31 < ratio7, "n=7 PBFT " + fmt("%.2f", p7) + " ms < RPBFT " + fmt("%.2f", r7) +
                                             " ms; ratio n=31 " + fmt("%.3f", ratio31) + " < n=7 " + fmt("%.3f", ratio7)};
}

// ---- 3: PBFT fault injection

Outcome pbft_faults()
{
    bool ok = true;
    std::string detail;
    for (std::uint32_t n : {4u, 7u}) {
        parallel::FaultCampaign c{n, 10 * kMs, 1000, 2024 + n};
        auto s = parallel::summarize(parallel::fault_trials(c));
        ok = ok && s.trials == 1000 && s.safety_violations == 0 && s.liveness_failures == 0;
        detail += "n=" + std::to_string(n) + ": " + std::to_string(s.trials) + " trials, " +
                  std::to_string(s.byzantine_trials) + " byzantine, " + std::to_string(s.safety_violations) +
                  " unsafe, " + std::to_string(s.liveness_failures) + " late; ";
    }
    return {ok, detail};
}

// ---- 4: chain integrity

Outcome chain_integrity()
{
    testing::Rng rng(404);
    std::vector<std::vector<chain::Block>> exports;
    bool verified = true;
    for (const auto& name : scenario::builtin_scenarios()) {
        auto r = scenario::run_scenario(scenario::builtin_scenario(name));
        std::istringstream in(r.chain_export);
        exports.push_back(chain::import_chain(in));
        verified = verified && chain::verify_chain(exports.back()).ok && parallel::verify_chain(exports.back()).ok;
    }
    int detected = 0, flips = 0;
    while (flips < 100) {
        auto blocks = exports[testing::uniform(rng, 0, exports.size() - 1)];
        auto& b = blocks[testing::uniform(rng, 1, blocks.size() - 1)];
        if (b.txs.empty())
            continue;
        auto& tx = b.txs[testing::uniform(rng, 0, b.txs.size() - 1)];
        if (tx.payload.empty())
            continue;
        ++flips;
        tx.payload[testing::uniform(rng, 0, tx.payload.size() - 1)] ^=
            static_cast<std::uint8_t>(testing::uniform(rng, 1, 255));
        auto serial = chain::verify_chain(blocks);
        auto par = parallel::verify_chain(blocks);
        detected += !serial.ok && !par.ok && serial.bad_height == par.bad_height && serial.bad_height == b.height;
    }
    return {verified && detected == 100, std::to_string(exports.size()) + " scenario exports verify " +
                                             (verified ? "ok" : "FAILED") + "; " + std::to_string(detected) +
                                             "/100 byte flips detected"};
}

// ---- 5: registration and access control

chain::ClusterOptions fast_chain()
{
    chain::ClusterOptions o;
    o.config.n_nodes = 4;
    o.config.link_delay = 2 * kMs;
    o.config.batch_timeout = 5 * kMs;
    return o;
}

Outcome access_control()
{
    simnet::TestbedConfig cfg;
    cfg.chain = fast_chain();
    simnet::Testbed tb(cfg);
    if (!tb.build())
        return {false, "testbed did not build"};

    tb.add_controller("c9");
    auto rogue = tb.connect("c9");
    const bool rejected = rogue.outcome == mw::ConnectOutcome::Rejected && rogue.reason == Errc::NotRegistered;

    tb.add_controller("c3");
    tb.register_controller("c3");
    tb.sched().run_for(kSec);
    const bool accepted = tb.connect("c3").outcome == mw::ConnectOutcome::Accepted;

    for (std::size_t h = 0; h < 6; ++h)
        tb.net().start_flow(h, (h + 3) % 25, 20, tb.sched().now(), tb.sched().now() + 10 * kSec);
    tb.sched().run_for(2 * kSec);
    std::size_t had_c1 = 0;
    for (const auto& [d, c] : tb.mw().mapping())
        had_c1 += c == "c1";

    std::size_t after_from_c1 = 0, forwarded = 0;
    bool evicted = false;
    tb.mw().on_forward([&](const mw::ForwardRecord& f) {
        ++forwarded;
        after_from_c1 += evicted && f.controller_id == "c1";
    });
    evicted = true;
    tb.mw().evict("c1", "acceptance");
    tb.sched().run_for(3 * kSec);

    bool remapped = tb.mw().mapping().size() == tb.net().topology().switch_count();
    for (const auto& [d, c] : tb.mw().mapping())
        remapped = remapped && c != "c1";
    auto again = tb.connect("c1");
    const bool refused = again.outcome == mw::ConnectOutcome::Rejected && again.reason == Errc::Evicted;
    const bool on_chain = tb.chain().ledger().registry().is_evicted("c1");

    return {rejected && accepted && remapped && refused && on_chain && after_from_c1 == 0 && forwarded > 0 && had_c1 > 0,
            std::string("unregistered ") + (rejected ? "rejected" : "ADMITTED") + ", registered " +
                (accepted ? "accepted" : "REFUSED") + ", " + std::to_string(had_c1) + " switches of c1 " +
                (remapped ? "remapped" : "NOT remapped") + ", evicted reconnect " + (refused ? "rejected" : "ADMITTED") +
                ", " + std::to_string(after_from_c1) + " forwards from c1 after evict (" + std::to_string(forwarded) +
                " total)"};
}

// ---- 6: keepalive

Outcome keepalive()
{
    simnet::TestbedConfig cfg;
    cfg.chain = fast_chain();
    simnet::Testbed tb(cfg);
    if (!tb.build())
        return {false, "testbed did not build"};
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
    if (first_unanswered < 0 || closed_at < 0)
        return {false, "no disconnect observed"};
    // The request left the middleware one pipe delay before the switch saw it.
    const double gap = to_seconds(closed_at - (first_unanswered - tb.config().network.control_delay));
    return {std::abs(gap - 15.0) <= 0.2, "Disconnected " + fmt("%.4f s", gap) + " after the first unanswered echo"};
}

// ---- 7: transparency and snapshot completeness

struct ExchangeRun {
    std::vector<Bytes> at_switch;
    std::vector<Bytes> at_controller;
    std::size_t snapshots = 0;
};

std::vector<Bytes> without_echo(const std::vector<testing::LoggedMsg>& log)
{
    std::vector<Bytes> out;
    for (const auto& m : log)
        if (!m.msg.is<ofwire::EchoRequest>() && !m.msg.is<ofwire::EchoReply>())
            out.push_back(m.raw);
    return out;
}

ExchangeRun run_exchange(bool via_middleware)
{
    Scheduler sched;
    chain::ChainService svc(sched, fast_chain());
    mw::MiddlewareConfig mcfg;
    mcfg.capture = {mw::CaptureMode::All, 1};
    mw::Middleware m(sched, svc, mcfg);
    auto ctrl = std::make_shared<testing::ScriptedController>(sched, 100);
    testing::ScriptedSwitch sw(sched, 0x42);
    if (via_middleware) {
        m.start();
        svc.register_element("c1", chain::Role::Controller, "k", "c1");
        sched.run_for(kSec);
        ctrl->up_bytes = [&m](mw::ConnId id, ByteView b) { m.controller_bytes(id, b); };
        if (m.controller_connect("c1", ctrl).outcome != mw::ConnectOutcome::Accepted)
            throw Error(Errc::InvariantViolation, "controller refused");
        auto [a, b] = simnet::make_pipe(sched, 100);
        auto conn = m.switch_connect(b);
        b->set_receiver([&m, conn](ByteView x) { m.switch_bytes(conn, x); });
        sw.connect(a);
    } else {
        sched.run_for(kSec);
        auto [a, b] = simnet::make_pipe(sched, 100);
        ctrl->accept(b);
        sw.connect(a);
    }
    sched.run_until(2 * kSec);
    if (!ctrl->established())
        throw Error(Errc::HandshakeTimeout, "handshake did not finish");
    auto script = testing::scripted_exchange(200);
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
    for (const auto& b : svc.ledger().blocks())
        for (const auto& tx : b->txs)
            r.snapshots += tx.kind == chain::TxKind::Snapshot;
    return r;
}

Outcome transparency()
{
    auto direct = run_exchange(false);
    auto proxied = run_exchange(true);
    // Both ends also see the handshake (Hello and Features).
    const std::size_t scripted = direct.at_switch.size() + direct.at_controller.size() - 4;
    const bool same = proxied.at_switch == direct.at_switch && proxied.at_controller == direct.at_controller;
    return {same && scripted == 200 && proxied.snapshots == 200,
            std::to_string(scripted) + " scripted messages, endpoints " + (same ? "byte-identical" : "DIFFER") + ", " +
                std::to_string(proxied.snapshots) + " Snapshot txs committed"};
}

// ---- 8: DDoS mitigation

Outcome ddos_mitigation()
{
    auto t0 = WallClock::now();
    auto none = scenario::run_scenario(scenario::builtin_scenario("ddos_basic"));
    const double wall_none = seconds_since(t0);
    t0 = WallClock::now();
    auto active = scenario::run_scenario(scenario::builtin_scenario("ddos_basic_active"));
    const double wall_active = seconds_since(t0);
    auto again = scenario::run_scenario(scenario::builtin_scenario("ddos_basic_active"));
    const bool deterministic = again.trace.csv() == active.trace.csv() && again.chain_export == active.chain_export;

    const double peak_none = scenario::peak_packet_in_rate(none.trace);
    const double rate_none = scenario::mean_packet_in_rate(none.trace, 6, 20);
    const double load_none = scenario::mean_controller_load(none.trace, 6, 20);
    const double peak_act = scenario::peak_packet_in_rate(active.trace);
    const double rate_act = scenario::mean_packet_in_rate(active.trace, 8, 20);
    const double load_act = scenario::mean_controller_load(active.trace, 8, 20);
    const auto& fd = active.summary.at("first_defense_s");
    const double defense_at = fd.is_number() ? fd.get<double>() : 1e9;

    const bool ok = rate_none >= 0.9 * peak_none && load_none >= 0.95 && defense_at <= 6.0 &&
                    rate_act < 0.1 * peak_act && load_act < 0.2 && deterministic && wall_none < 30 && wall_active < 30;
    return {ok, "none: rate " + fmt("%.0f", rate_none) + "/s vs peak " + fmt("%.0f", peak_none) + ", load " +
                    fmt("%.3f", load_none) + "; active: defense at " + fmt("%.2f s", defense_at) + ", rate " +
                    fmt("%.1f", rate_act) + "/s vs peak " + fmt("%.0f", peak_act) + ", load " + fmt("%.3f", load_act) +
                    "; deterministic " + (deterministic ? "yes" : "NO") + "; wall " + fmt("%.1f", wall_none) + "/" +
                    fmt("%.1f s", wall_active)};
}

// ---- 9: policy ladder

struct LadderRun {
    double below_s = -1;
    std::vector<std::string> stages;
    bool detect_before_isolate = false;
    std::size_t named_flows = 0;
    std::string final_stage;
};

LadderRun run_ladder(const std::string& name)
{
    auto spec = scenario::builtin_scenario(name);
    scenario::RuntimeOptions opts;
    scenario::Runtime rt(spec, opts);
    if (!rt.start())
        throw Error(Errc::InvariantViolation, "testbed did not build");
    rt.schedule(spec.events);

    double attack_at = 0;
    std::string victim;
    for (const auto& ev : spec.events)
        if (const auto* d = std::get_if<scenario::StartDdos>(&ev.what)) {
            attack_at = ev.at_s;
            victim = d->victims.at(0);
        }
    const auto& topo = rt.testbed().net().topology();
    const auto h = rt.host(victim);
    const auto dpid = topo.dpid(topo.host_switch(h));
    const auto port = topo.host_port(h);

    LadderRun out;
    double threshold = 0;
    bool exceeded = false;
    for (double t = attack_at; t <= spec.duration_s + 1e-9; t += 0.1) {
        rt.run_until_rel(from_seconds(t));
        if (threshold == 0) {
            const double base = rt.guard().port_packet_rate(dpid, port, guard::SampleKind::PortTx, 0,
                                                            rt.guard().config().baseline_period);
            threshold = opts.engine.success_factor * std::max(base, opts.engine.baseline_floor);
        }
        const double rate =
            rt.guard().port_packet_rate(dpid, port, guard::SampleKind::PortTx, from_seconds(t - 1), from_seconds(t));
        if (rate > threshold)
            exceeded = true;
        else if (exceeded && out.below_s < 0)
            out.below_s = t;
    }

    std::uint64_t detect_seq = 0, isolate_seq = 0;
    for (const auto& e : rt.events().all()) {
        if (e.kind != EventKind::IntentTransition)
            continue;
        if (e.payload.value("action", "") == "Detect" && detect_seq == 0)
            detect_seq = e.seq;
        if (e.payload.contains("from_stage")) {
            std::string s = e.payload.at("stage");
            out.stages.push_back(s);
            if (s == "IsolateAbnormalFlow" && isolate_seq == 0)
                isolate_seq = e.seq;
        }
    }
    out.detect_before_isolate = detect_seq != 0 && isolate_seq != 0 && detect_seq < isolate_seq;
    const auto ids = rt.engine().intents();
    if (!ids.empty()) {
        const auto& id = ids.front().intent_id;
        out.final_stage = guard::to_string(rt.engine().stage(id));
        const auto& reps = rt.engine().reports(id);
        if (!reps.empty())
            out.named_flows = reps.back().attacker_flows.size();
    }
    return out;
}

std::string join(const std::vector<std::string>& v)
{
    std::string s;
    for (const auto& x : v)
        s += (s.empty() ? "" : ">") + x;
    return s;
}

Outcome policy_ladder()
{
    auto prot = run_ladder("ladder_maxprot");
    auto perf = run_ladder("ladder_maxperf");
    std::vector<std::string> escal;
    for (const auto& s : prot.stages)
        if (s == "LimitAbnormalLink" || s == "LimitAbnormalIp" || s == "IsolateAbnormalFlow")
            escal.push_back(s);
    const bool order = escal == std::vector<std::string>{"LimitAbnormalLink", "LimitAbnormalIp", "IsolateAbnormalFlow"};
    const bool faster = perf.below_s >= 0 && prot.below_s >= 0 && perf.below_s <= prot.below_s;
    const bool stable = prot.final_stage == "Stable" && perf.final_stage == "Stable";
    return {order && prot.detect_before_isolate && prot.named_flows > 0 && faster && stable,
            "MaxProtection " + join(prot.stages) + ", Detect before isolation " +
                (prot.detect_before_isolate ? "yes" : "NO") + ", " + std::to_string(prot.named_flows) +
                " named flows; below threshold at " + fmt("%.1f s", perf.below_s) + " (MaxPerformance) vs " +
                fmt("%.1f s", prot.below_s) + " (MaxProtection); final " + perf.final_stage + "/" + prot.final_stage};
}

// ---- 10: oracles

Outcome oracles()
{
    testing::Rng rng(1010);
    std::size_t lookups = 0, lookup_bad = 0;
    while (lookups < 10000) {
        simnet::FlowTable table;
        const auto n_mods = testing::uniform(rng, 0, 40);
        for (std::uint64_t i = 0; i < n_mods; ++i)
            table.apply(testing::random_table_mod(rng), static_cast<TimeUs>(i));
        auto entries = table.entries();
        for (int q = 0; q < 25; ++q, ++lookups) {
            auto port = static_cast<std::uint32_t>(testing::uniform(rng, 1, 4));
            auto f = testing::random_frame(rng);
            const auto* fast = table.lookup(port, f);
            const auto* slow = simnet::lookup_linear(entries, port, f);
            lookup_bad += (fast == nullptr) != (slow == nullptr) || (fast && fast->seq != slow->seq);
        }
    }

    std::size_t path_pairs = 0, path_bad = 0, recalc_pairs = 0, recalc_bad = 0;
    for (const auto& name : simnet::named_topologies()) {
        simnet::Topology t(simnet::named_topology(name, 2 * simnet::named_topology(name, 0).switches.size()));
        for (std::size_t ex = 0; ex <= t.switch_count(); ++ex) {
            std::set<std::size_t> excluded;
            if (ex < t.switch_count())
                excluded.insert(ex);
            for (std::size_t a = 0; a < t.switch_count(); ++a)
                for (std::size_t b = 0; b < t.switch_count(); ++b, ++path_pairs)
                    path_bad += t.shortest_path(a, b, excluded) != testing::brute_force_path(t, a, b, excluded);
        }
        for (std::size_t avoid = 0; avoid < t.switch_count(); ++avoid) {
            auto r = testing::recalc_mismatches(t, avoid);
            recalc_pairs += r.pairs;
            recalc_bad += r.wrong;
        }
    }

    std::size_t codec_bad = 0;
    for (int i = 0; i < 10000; ++i) {
        auto m = testing::random_message(rng);
        auto bytes = ofwire::encode(m);
        auto [back, rest] = ofwire::decode(bytes);
        codec_bad += !(back == m) || !rest.empty();
    }
    return {lookup_bad == 0 && path_bad == 0 && recalc_bad == 0 && codec_bad == 0,
            std::to_string(lookups - lookup_bad) + "/" + std::to_string(lookups) + " lookups, " +
                std::to_string(path_pairs - path_bad) + "/" + std::to_string(path_pairs) + " switch paths, " +
                std::to_string(recalc_pairs) + " recalculated host pairs with " + std::to_string(recalc_bad) +
                " mismatches, " + std::to_string(10000 - codec_bad) + "/10000 codec round trips"};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sdnchain acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Run just these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "consensus ordering", consensus_ordering},
        {2, "algorithm gap", algorithm_gap},
        {3, "PBFT safety/liveness", pbft_faults},
        {4, "chain integrity", chain_integrity},
        {5, "registration/access control", access_control},
        {6, "keepalive", keepalive},
        {7, "transparency + snapshot completeness", transparency},
        {8, "DDoS mitigation", ddos_mitigation},
        {9, "policy ladder", policy_ladder},
        {10, "oracles", oracles},
    };
    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
            continue;
        Outcome o;
        auto t0 = WallClock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
