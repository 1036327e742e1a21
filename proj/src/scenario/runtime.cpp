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


#include "sdnchain/scenario/runtime.hpp"

#include "sdnchain/core/error.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace sdnchain::scenario {

namespace {

std::string fmt(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

nlohmann::json anomaly_json(const guard::Anomaly& a)
{
    auto ports = nlohmann::json::array();
    for (const auto& p : a.ports)
        ports.push_back({{"switch_id", p.switch_id}, {"in_port", p.in_port}, {"rate", p.rate}});
    auto sources = nlohmann::json::array();
    for (const auto& s : a.sources)
        sources.push_back({{"src", s.src.str()}, {"rate", s.rate}});
    return {{"id", a.id},
            {"kind", a.kind},
            {"victim", a.victim.str()},
            {"rate", a.rate},
            {"baseline", a.baseline},
            {"window", {{"start_us", a.window_start}, {"end_us", a.window_end}}},
            {"ports", ports},
            {"sources", sources},
            {"flows", a.flows.size()}};
}

simnet::TestbedConfig testbed_config(const ScenarioSpec& s)
{
    simnet::TestbedConfig c;
    c.topology = s.topology;
    c.chain.config = s.blockchain;
    c.chain.seed = s.seed;
    c.middleware.capture = s.capture;
    c.controllers = s.controllers;
    c.seed = s.seed;
    return c;
}

} // namespace

std::string MetricsTrace::csv() const
{
    std::ostringstream out;
    out << "t_s,packet_in_rate,controller_load,link_id,byte_rate\n";
    for (const auto& p : points)
        for (const auto& [link, rate] : p.link_rates)
            out << fmt(p.t_s) << ',' << fmt(p.packet_in_rate) << ',' << fmt(p.controller_load) << ',' << link << ','
                << fmt(rate) << '\n';
    return out.str();
}

std::vector<std::pair<double, double>> MetricsTrace::link_series(const std::string& link_id) const
{
    std::vector<std::pair<double, double>> out;
    for (const auto& p : points)
        for (const auto& [link, rate] : p.link_rates)
            if (link == link_id)
                out.emplace_back(p.t_s, rate);
    return out;
}

Runtime::Runtime(const ScenarioSpec& spec, RuntimeOptions opts)
    : spec_(spec), opts_(std::move(opts)), tb_(std::make_unique<simnet::Testbed>(testbed_config(spec))),
      guard_(opts_.guard), events_(opts_.event_capacity), rng_(spec.seed ^ 0x5ce1a510ull),
      alive_(std::make_shared<bool>(true))
{
}

Runtime::~Runtime()
{
    *alive_ = false;
}

bool Runtime::start()
{
    // Build-phase events are stamped 0; relative time starts once the build is done.
    tb_->chain().on_block([this](const chain::BlockPtr& b, TimeUs) {
        events_.append(EventKind::BlockCommitted,
                       {{"height", b->height},
                        {"block_hash", chain::digest_hex(b->block_hash)},
                        {"tx_count", b->txs.size()},
                        {"total_tx", tb_->chain().ledger().total_tx()}},
                       std::max<TimeUs>(0, now_rel()));
    });
    tb_->mw().on_event([this](const mw::MwEvent& e) {
        auto at = std::max<TimeUs>(0, now_rel());
        if (e.kind == mw::MwEvent::Kind::MappingChanged) {
            events_.append(EventKind::MappingChanged,
                           {{"switch", e.element},
                            {"from", e.from_controller ? nlohmann::json(*e.from_controller) : nlohmann::json()},
                            {"to", e.to_controller ? nlohmann::json(*e.to_controller) : nlohmann::json()},
                            {"reason", e.detail}},
                           at);
        } else {
            events_.append(EventKind::ScenarioEvent,
                           {{"source", "middleware"}, {"what", mw::to_string(e.kind)}, {"element", e.element},
                            {"detail", e.detail}},
                           at);
        }
    });
    events_.subscribe([this](const ApiEvent& e) {
        const double t = to_seconds(e.timestamp_us);
        switch (e.kind) {
        case EventKind::AnomalyRaised:
            trace_.annotations.push_back({t, "anomaly", e.payload});
            break;
        case EventKind::DefenseInstalled:
            trace_.annotations.push_back({t, "defense_installed", e.payload});
            break;
        case EventKind::IntentTransition:
            if (e.payload.contains("from_stage"))
                trace_.annotations.push_back({t, "stage", e.payload});
            break;
        case EventKind::ScenarioEvent:
            if (e.payload.value("source", "") == "scenario")
                trace_.annotations.push_back({t, e.payload.value("what", ""), e.payload});
            break;
        default:
            break;
        }
    });
    if (!tb_->build())
        return false;
    epoch_ = tb_->sched().now();

    auto ecfg = opts_.engine;
    ecfg.submitter = tb_->mw().config().id;
    ecfg.epoch = epoch_;
    fabric_ = std::make_unique<TestbedFabric>(*tb_);
    engine_ = std::make_unique<intent::Engine>(tb_->sched(), tb_->chain(), *fabric_, guard_, ecfg, &events_);

    tb_->net().set_sample_sink([this](guard::TrafficSample s) {
        s.timestamp_us -= epoch_;
        guard_.ingest(s);
    });
    for (const auto& [id, c] : tb_->controllers())
        last_pins_[id] = c->packet_ins();
    for (const auto& l : tb_->net().topology().link_ids())
        last_link_bytes_[l] = tb_->net().link_bytes(l);
    tb_->sched().at(epoch_ + opts_.guard_tick, [this, alive = alive_] {
        if (*alive)
            guard_tick();
    });
    tb_->sched().at(epoch_ + opts_.metrics_interval, [this, alive = alive_] {
        if (*alive)
            metrics_tick();
    });
    tb_->net().announce_hosts(epoch_);
    scenario_event("start", {{"name", spec_.name}, {"seed", spec_.seed}, {"defense", to_string(spec_.defense)}});
    return true;
}

void Runtime::scenario_event(const std::string& what, nlohmann::json detail)
{
    detail["source"] = "scenario";
    detail["what"] = what;
    events_.append(EventKind::ScenarioEvent, std::move(detail), now_rel());
}

void Runtime::guard_tick()
{
    for (const auto& a : guard_.detect(now_rel())) {
        events_.append(EventKind::AnomalyRaised, anomaly_json(a), now_rel());
        engine_->on_anomaly(a);
    }
    tb_->sched().after(opts_.guard_tick, [this, alive = alive_] {
        if (*alive)
            guard_tick();
    });
}

void Runtime::metrics_tick()
{
    const TimeUs now = tb_->sched().now();
    const double span = to_seconds(opts_.metrics_interval);
    MetricsPoint p;
    p.t_s = to_seconds(now_rel());
    for (const auto& [id, c] : tb_->controllers()) {
        auto n = c->packet_ins();
        double rate = static_cast<double>(n - last_pins_[id]) / span;
        last_pins_[id] = n;
        double load = guard::controller_load(c->queue().log(), now - opts_.metrics_interval, now);
        p.controller_rates[id] = rate;
        p.controller_loads[id] = load;
        p.packet_in_rate += rate;
        p.controller_load = std::max(p.controller_load, load);
    }
    for (const auto& l : tb_->net().topology().link_ids()) {
        auto b = tb_->net().link_bytes(l);
        p.link_rates.emplace_back(l, static_cast<double>(b - last_link_bytes_[l]) / span);
        last_link_bytes_[l] = b;
    }
    nlohmann::json links = nlohmann::json::object();
    for (const auto& [l, r] : p.link_rates)
        links[l] = r;
    events_.append(EventKind::MetricsTick,
                   {{"t_s", p.t_s},
                    {"packet_in_rate", p.packet_in_rate},
                    {"controller_load", p.controller_load},
                    {"controllers", {{"packet_in_rate", p.controller_rates}, {"load", p.controller_loads}}},
                    {"links", links}},
                   now_rel());
    trace_.points.push_back(std::move(p));
    tb_->sched().after(opts_.metrics_interval, [this, alive = alive_] {
        if (*alive)
            metrics_tick();
    });
}

std::size_t Runtime::host(const std::string& name) const
{
    const auto& topo = tb_->net().topology();
    if (auto h = topo.host_by_name(name))
        return *h;
    try {
        if (auto h = topo.host_by_ip(Ipv4Addr::parse(name)))
            return *h;
    } catch (const Error&) {
    }
    throw Error(Errc::UnknownTarget, "no host " + name);
}

void Runtime::start_traffic(const StartTraffic& t)
{
    const auto& topo = tb_->net().topology();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [a, b] : t.pairs)
        pairs.emplace_back(host(a), host(b));
    const auto n = topo.host_count();
    std::size_t guard = 0;
    while (pairs.size() < t.pairs.size() + t.random_pairs && n >= 2 && guard++ < 10000) {
        auto a = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
        auto b = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
        if (a == b || std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) != pairs.end())
            continue;
        pairs.emplace_back(a, b);
    }
    const TimeUs now = tb_->sched().now();
    const TimeUs stop = epoch_ + from_seconds(spec_.duration_s) + kSec;
    auto doc = nlohmann::json::array();
    for (auto [a, b] : pairs) {
        tb_->net().start_flow(a, b, t.rate, now, stop);
        background_.insert(a);
        background_.insert(b);
        doc.push_back({topo.host(a).name, topo.host(b).name});
    }
    scenario_event("traffic_start", {{"pairs", doc}, {"rate", t.rate}});
}

void Runtime::start_ddos(const StartDdos& d)
{
    std::vector<Ipv4Addr> victims;
    for (const auto& v : d.victims) {
        try {
            victims.push_back(tb_->net().topology().host(host(v)).ip);
        } catch (const Error&) {
            throw Error(Errc::UnknownVictim, "no host " + v);
        }
    }
    const TimeUs now = tb_->sched().now();
    const TimeUs stop = epoch_ + from_seconds(spec_.duration_s) + kSec;
    auto plans = tb_->net().ddos_generate(victims, d.spoofed_source_count, d.rate, now, stop, background_);
    auto doc = nlohmann::json::array();
    for (const auto& p : plans) {
        doc.push_back({{"victim", tb_->net().topology().host(p.victim).name},
                       {"attacker", tb_->net().topology().host(p.attacker).name},
                       {"rate", p.rate},
                       {"spoofed_sources", p.spoofed.size()}});
        attacks_.push_back(p);
    }
    scenario_event("attack_start", {{"attacks", doc}});
}

void Runtime::stop_attack()
{
    tb_->net().stop_attacks(tb_->sched().now());
    scenario_event("attack_stop", nlohmann::json::object());
}

std::string Runtime::submit_intent(const intent::Intent& in)
{
    return engine_->submit(in);
}

void Runtime::schedule(const std::vector<TimedEvent>& events)
{
    for (const auto& ev : events) {
        auto when = std::max(epoch_ + from_seconds(ev.at_s), tb_->sched().now());
        tb_->sched().at(when, [this, what = ev.what, alive = alive_] {
            if (!*alive)
                return;
            try {
                std::visit(
                    [&](const auto& w) {
                        using T = std::decay_t<decltype(w)>;
                        if constexpr (std::is_same_v<T, StartTraffic>)
                            start_traffic(w);
                        else if constexpr (std::is_same_v<T, StartDdos>)
                            start_ddos(w);
                        else if constexpr (std::is_same_v<T, SubmitIntent>)
                            submit_intent(w.intent);
                        else
                            stop_attack();
                    },
                    what);
            } catch (const Error& e) {
                scenario_event("error", {{"message", e.what()}});
            }
        });
    }
}

} // namespace sdnchain::scenario
