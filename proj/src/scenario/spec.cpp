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


#include "sdnchain/scenario/spec.hpp"

#include "sdnchain/core/error.hpp"

#include <fstream>

namespace sdnchain::scenario {

std::string_view to_string(Defense d)
{
    return d == Defense::Active ? "active" : "none";
}

Defense parse_defense(std::string_view s)
{
    if (s == "none" || s == "None")
        return Defense::None;
    if (s == "active" || s == "Active")
        return Defense::Active;
    throw Error(Errc::InvalidArgument, "defense must be none or active, got " + std::string(s));
}

namespace {

mw::CapturePolicy capture_from_json(const nlohmann::json& j)
{
    mw::CapturePolicy p;
    if (j.is_string()) {
        p.mode = mw::parse_capture_mode(j.get<std::string>());
        return p;
    }
    p.mode = mw::parse_capture_mode(j.at("mode").get<std::string>());
    p.sample_every = j.value("every", p.sample_every);
    if (p.sample_every == 0)
        throw Error(Errc::InvalidArgument, "capture.every must be positive");
    return p;
}

nlohmann::json capture_json(const mw::CapturePolicy& p)
{
    if (p.mode == mw::CaptureMode::Sampled)
        return {{"mode", mw::to_string(p.mode)}, {"every", p.sample_every}};
    return mw::to_string(p.mode);
}

chain::ConsensusConfig chain_from_json(const nlohmann::json& j)
{
    chain::ConsensusConfig c;
    c.algorithm = chain::parse_algorithm(j.value("algorithm", std::string(chain::to_string(c.algorithm))));
    c.n_nodes = j.value("nodes", c.n_nodes);
    if (j.contains("link_delay_ms"))
        c.link_delay = from_seconds(j.at("link_delay_ms").get<double>() / 1000.0);
    if (j.contains("batch_timeout_ms"))
        c.batch_timeout = from_seconds(j.at("batch_timeout_ms").get<double>() / 1000.0);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.rpbft_committee_size = j.value("committee_size", c.rpbft_committee_size);
    c.validate();
    return c;
}

nlohmann::json chain_json(const chain::ConsensusConfig& c)
{
    return {{"algorithm", chain::to_string(c.algorithm)},
            {"nodes", c.n_nodes},
            {"link_delay_ms", to_seconds(c.link_delay) * 1000.0},
            {"batch_timeout_ms", to_seconds(c.batch_timeout) * 1000.0},
            {"batch_size", c.batch_size},
            {"committee_size", c.rpbft_committee_size}};
}

TimedEvent event_from_json(const nlohmann::json& j)
{
    TimedEvent e;
    e.at_s = j.at("at_s").get<double>();
    const auto type = j.at("type").get<std::string>();
    if (type == "StartTraffic") {
        StartTraffic t;
        for (const auto& p : j.value("pairs", nlohmann::json::array()))
            t.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        t.random_pairs = j.value("random_pairs", std::size_t{0});
        t.rate = j.value("rate", t.rate);
        if (t.rate < 0)
            throw Error(Errc::InvalidArgument, "StartTraffic.rate must be >= 0");
        e.what = t;
    } else if (type == "StartDdos") {
        StartDdos d;
        d.victims = j.at("victims").get<std::vector<std::string>>();
        d.spoofed_source_count = j.value("spoofed_source_count", 0u);
        d.rate = j.value("rate", d.rate);
        if (d.rate < 0)
            throw Error(Errc::InvalidArgument, "StartDdos.rate must be >= 0");
        e.what = d;
    } else if (type == "SubmitIntent") {
        e.what = SubmitIntent{intent::intent_from_json(j.at("intent"))};
    } else if (type == "StopAttack") {
        e.what = StopAttack{};
    } else {
        throw Error(Errc::InvalidArgument, "unknown event type " + type);
    }
    return e;
}

nlohmann::json event_json(const TimedEvent& e)
{
    nlohmann::json j{{"at_s", e.at_s}};
    std::visit(
        [&j](const auto& w) {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, StartTraffic>) {
                j["type"] = "StartTraffic";
                if (!w.pairs.empty()) {
                    j["pairs"] = nlohmann::json::array();
                    for (const auto& [a, b] : w.pairs)
                        j["pairs"].push_back({a, b});
                }
                if (w.random_pairs)
                    j["random_pairs"] = w.random_pairs;
                j["rate"] = w.rate;
            } else if constexpr (std::is_same_v<T, StartDdos>) {
                j["type"] = "StartDdos";
                j["victims"] = w.victims;
                j["spoofed_source_count"] = w.spoofed_source_count;
                j["rate"] = w.rate;
            } else if constexpr (std::is_same_v<T, SubmitIntent>) {
                j["type"] = "SubmitIntent";
                j["intent"] = {{"verb", intent::to_string(w.intent.verb)},
                               {"target", w.intent.target},
                               {"preference", intent::to_string(w.intent.preference)}};
            } else {
                j["type"] = "StopAttack";
            }
        },
        e.what);
    return j;
}

} // namespace

ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base)
{
    try {
        ScenarioSpec s;
        s.version = j.value("version", kSchemaVersion);
        if (s.version != kSchemaVersion)
            throw Error(Errc::InvalidArgument, "unsupported scenario version " + std::to_string(s.version));
        s.name = j.value("name", s.name);
        if (j.contains("topology")) {
            const auto& t = j.at("topology");
            if (t.is_object()) {
                s.topology = simnet::topology_from_json(t);
            } else {
                auto name = t.get<std::string>();
                auto names = simnet::named_topologies();
                if (name == "default" || std::find(names.begin(), names.end(), name) != names.end()) {
                    s.topology = simnet::named_topology(name, j.value("hosts", std::size_t{25}));
                } else {
                    std::ifstream in(base / name);
                    if (!in)
                        throw Error(Errc::InvalidArgument, "topology file not found: " + (base / name).string());
                    s.topology = simnet::topology_from_json(nlohmann::json::parse(in));
                }
            }
        }
        if (j.contains("blockchain"))
            s.blockchain = chain_from_json(j.at("blockchain"));
        if (j.contains("controllers"))
            s.controllers = j.at("controllers").get<std::vector<std::string>>();
        if (s.controllers.empty())
            throw Error(Errc::InvalidArgument, "at least one controller is required");
        if (j.contains("capture"))
            s.capture = capture_from_json(j.at("capture"));
        s.duration_s = j.value("duration_s", s.duration_s);
        if (!(s.duration_s > 0) || s.duration_s > 3600)
            throw Error(Errc::InvalidArgument, "duration_s must be in (0, 3600]");
        s.seed = j.value("seed", s.seed);
        s.defense = parse_defense(j.value("defense", std::string("none")));
        for (const auto& e : j.value("events", nlohmann::json::array())) {
            auto ev = event_from_json(e);
            if (ev.at_s < 0 || ev.at_s > s.duration_s)
                throw Error(Errc::InvalidArgument, "event time outside the scenario duration");
            s.events.push_back(std::move(ev));
        }
        std::stable_sort(s.events.begin(), s.events.end(),
                         [](const TimedEvent& a, const TimedEvent& b) { return a.at_s < b.at_s; });
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("scenario document: ") + e.what());
    }
}

nlohmann::json to_json(const ScenarioSpec& s)
{
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : s.events)
        events.push_back(event_json(e));
    return {{"version", s.version},
            {"name", s.name},
            {"topology", simnet::to_json(s.topology)},
            {"blockchain", chain_json(s.blockchain)},
            {"controllers", s.controllers},
            {"capture", capture_json(s.capture)},
            {"duration_s", s.duration_s},
            {"seed", s.seed},
            {"defense", to_string(s.defense)},
            {"events", events}};
}

ScenarioSpec load_scenario(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw Error(Errc::InvalidArgument, "cannot open scenario " + file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, file.string() + ": " + e.what());
    }
    return scenario_from_json(j, file.parent_path());
}

std::vector<std::string> builtin_scenarios()
{
    return {"ddos_basic", "ddos_basic_active", "ladder_maxperf", "ladder_maxprot", "no_attack"};
}

ScenarioSpec builtin_scenario(std::string_view name)
{
    ScenarioSpec s;
    s.name = std::string(name);
    s.blockchain.n_nodes = 4;
    s.controllers = {"c1"};
    s.capture = {mw::CaptureMode::Sampled, 10};
    s.duration_s = 20;
    s.events.push_back({0.0, StartTraffic{{}, 5, 10}});
    auto intent_event = [](intent::Preference pref) {
        intent::Intent in;
        in.verb = intent::Verb::ProtectService;
        in.target = "h5";
        in.preference = pref;
        return TimedEvent{0.5, SubmitIntent{in}};
    };
    if (name == "ddos_basic" || name == "ddos_basic_active") {
        s.defense = name == "ddos_basic" ? Defense::None : Defense::Active;
        s.events.push_back({2.0, StartDdos{{"h5", "h14"}, 20, 500}});
        return s;
    }
    if (name == "ladder_maxperf" || name == "ladder_maxprot") {
        s.duration_s = 30;
        s.events.push_back(intent_event(name == "ladder_maxperf" ? intent::Preference::MaxPerformance
                                                                 : intent::Preference::MaxProtection));
        s.events.push_back({2.0, StartDdos{{"h5"}, 20, 500}});
        std::stable_sort(s.events.begin(), s.events.end(),
                         [](const TimedEvent& a, const TimedEvent& b) { return a.at_s < b.at_s; });
        return s;
    }
    if (name == "no_attack")
        return s;
    throw Error(Errc::InvalidArgument, "unknown scenario " + std::string(name));
}

} // namespace sdnchain::scenario
