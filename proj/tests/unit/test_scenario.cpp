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


#include "sdnchain/chain/ledger.hpp"
#include "sdnchain/core/error.hpp"
#include "sdnchain/scenario/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sdnchain;
using namespace sdnchain::scenario;

namespace {

std::string events_text(const std::vector<ApiEvent>& evs)
{
    std::string out;
    for (const auto& e : evs)
        out += to_json(e).dump() + "\n";
    return out;
}

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::InvariantViolation;
}

} // namespace

TEST_CASE("a scenario run is a pure function of its spec")
{
    auto spec = builtin_scenario("ddos_basic_active");
    spec.duration_s = 8;
    auto a = run_scenario(spec);
    auto b = run_scenario(spec);
    CHECK(a.trace.csv() == b.trace.csv());
    CHECK(a.chain_export == b.chain_export);
    CHECK(events_text(a.events) == events_text(b.events));
    CHECK(a.summary == b.summary);

    spec.seed = 2;
    auto c = run_scenario(spec);
    CHECK(c.chain_export != a.chain_export);
}

TEST_CASE("a subscriber does not change the run")
{
    auto spec = builtin_scenario("ladder_maxperf");
    spec.duration_s = 6;
    auto plain = run_scenario(spec);
    std::size_t seen = 0;
    std::string mirrored;
    auto watched = run_scenario(spec, [&](const ApiEvent& e) {
        ++seen;
        mirrored += to_json(e).dump() + "\n";
    });
    CHECK(plain.trace.csv() == watched.trace.csv());
    CHECK(plain.chain_export == watched.chain_export);
    CHECK(seen == watched.events.size());
    CHECK(mirrored == events_text(plain.events));
}

TEST_CASE("no-attack baseline stays quiet")
{
    auto r = run_scenario(builtin_scenario("no_attack"));
    CHECK(r.summary.at("attack_start_s").is_null());
    CHECK(r.summary.at("first_anomaly_s").is_null());
    CHECK(r.summary.at("first_defense_s").is_null());
    CHECK(r.summary.at("frames").at("conserved") == true);
    CHECK(mean_controller_load(r.trace, 2, 20) < 0.2);
    for (const auto& e : r.events)
        CHECK(e.kind != EventKind::AnomalyRaised);
    // The chain export verifies and its head matches the summary.
    std::istringstream in(r.chain_export);
    auto blocks = chain::import_chain(in);
    CHECK(chain::verify_chain(blocks).ok);
    CHECK(blocks.back().height == r.summary.at("chain").at("height"));
}

TEST_CASE("event sequence numbers are dense and increasing")
{
    auto r = run_scenario(builtin_scenario("ddos_basic"));
    REQUIRE_FALSE(r.events.empty());
    for (std::size_t i = 0; i < r.events.size(); ++i)
        CHECK(r.events[i].seq == i + 1);
    for (std::size_t i = 1; i < r.events.size(); ++i)
        CHECK(r.events[i].timestamp_us >= r.events[i - 1].timestamp_us);
}

TEST_CASE("scenario documents round-trip")
{
    for (const auto& name : builtin_scenarios()) {
        CAPTURE(name);
        auto s = builtin_scenario(name);
        auto j = to_json(s);
        CHECK(to_json(scenario_from_json(j)) == j);
    }
    auto s = builtin_scenario("ddos_basic");
    s.topology = simnet::named_topology("tree7", 8);
    s.blockchain.algorithm = chain::Algorithm::Rpbft;
    s.capture = {mw::CaptureMode::All, 1};
    CHECK(to_json(scenario_from_json(to_json(s))) == to_json(s));
}

TEST_CASE("scenario documents: errors name the field")
{
    auto base = to_json(builtin_scenario("ddos_basic"));
    auto with = [&](auto edit) {
        auto j = base;
        edit(j);
        return j;
    };
    CHECK(code_of([&] { scenario_from_json(with([](auto& j) { j["version"] = 9; })); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { scenario_from_json(with([](auto& j) { j["controllers"] = nlohmann::json::array(); })); }) ==
          Errc::InvalidArgument);
    CHECK(code_of([&] { scenario_from_json(with([](auto& j) { j["duration_s"] = -1; })); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { scenario_from_json(with([](auto& j) { j["defense"] = "maybe"; })); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { scenario_from_json(with([](auto& j) { j["events"][0]["type"] = "Teleport"; })); }) ==
          Errc::InvalidArgument);
    CHECK(code_of([&] { scenario_from_json(with([](auto& j) { j["events"][0]["at_s"] = 999; })); }) ==
          Errc::InvalidArgument);
    CHECK(code_of([&] { scenario_from_json(with([](auto& j) { j["topology"] = "missing.json"; })); }) ==
          Errc::InvalidArgument);
    CHECK(code_of([] { builtin_scenario("nope"); }) == Errc::InvalidArgument);
    try {
        scenario_from_json(with([](auto& j) { j["duration_s"] = 0; }));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("duration_s") != std::string::npos);
    }
}

TEST_CASE("scenario files resolve relative topology names")
{
    auto dir = std::filesystem::temp_directory_path() / "sdnchain_scn_test";
    std::filesystem::create_directories(dir / "topologies");
    {
        std::ofstream t(dir / "topologies" / "ring.json");
        t << simnet::to_json(simnet::named_topology("default6", 6)).dump();
    }
    auto j = to_json(builtin_scenario("no_attack"));
    j["topology"] = "topologies/ring.json";
    {
        std::ofstream s(dir / "scn.json");
        s << j.dump();
    }
    auto spec = load_scenario(dir / "scn.json");
    CHECK(spec.topology.switches.size() == 6);
    CHECK(spec.topology.hosts.size() == 6);
    CHECK(code_of([&] { load_scenario(dir / "absent.json"); }) == Errc::InvalidArgument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("write_outputs produces the five files")
{
    auto spec = builtin_scenario("no_attack");
    spec.duration_s = 3;
    auto r = run_scenario(spec);
    auto dir = std::filesystem::temp_directory_path() / "sdnchain_out_test";
    write_outputs(r, dir);
    for (const char* f : {"metrics.csv", "events.ndjson", "chain.ndjson", "summary.json", "scenario.json"})
        CHECK(std::filesystem::exists(dir / f));
    std::ifstream csv(dir / "metrics.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t_s,packet_in_rate,controller_load,link_id,byte_rate");
    std::filesystem::remove_all(dir);
}

TEST_CASE("DDoS without defense saturates the controller; with defense it recovers")
{
    auto none = run_scenario(builtin_scenario("ddos_basic"));
    auto active = run_scenario(builtin_scenario("ddos_basic_active"));
    double peak_none = peak_packet_in_rate(none.trace);
    double peak_active = peak_packet_in_rate(active.trace);
    CHECK(mean_packet_in_rate(none.trace, 6, 20) >= 0.9 * peak_none);
    CHECK(mean_controller_load(none.trace, 6, 20) >= 0.95);
    REQUIRE(active.summary.at("first_defense_s").is_number());
    CHECK(active.summary.at("first_defense_s").get<double>() <= 6.0);
    CHECK(mean_packet_in_rate(active.trace, 8, 20) < 0.1 * peak_active);
    CHECK(mean_controller_load(active.trace, 8, 20) < 0.2);
}
