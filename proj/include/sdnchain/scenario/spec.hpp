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


#pragma once

#include "sdnchain/chain/cluster.hpp"
#include "sdnchain/intent/intent.hpp"
#include "sdnchain/mw/middleware.hpp"
#include "sdnchain/simnet/topology.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sdnchain::scenario {

constexpr int kSchemaVersion = 1;

enum class Defense { None, Active };

std::string_view to_string(Defense d);
Defense parse_defense(std::string_view s);

struct StartTraffic {
    std::vector<std::pair<std::string, std::string>> pairs; // host names or addresses
    std::size_t random_pairs = 0;
    double rate = 10; // frames/s per pair
};

struct StartDdos {
    std::vector<std::string> victims;
    std::uint32_t spoofed_source_count = 0; // 0: a fresh source per frame
    double rate = 500;                      // frames/s per victim
};

struct SubmitIntent {
    intent::Intent intent;
};

struct StopAttack { };

struct TimedEvent {
    double at_s = 0;
    std::variant<StartTraffic, StartDdos, SubmitIntent, StopAttack> what;
};

struct ScenarioSpec {
    int version = kSchemaVersion;
    std::string name = "unnamed";
    simnet::TopologySpec topology = simnet::default_topology();
    chain::ConsensusConfig blockchain;
    std::vector<std::string> controllers{"c1", "c2"};
    mw::CapturePolicy capture;
    double duration_s = 20;
    std::uint64_t seed = 1;
    Defense defense = Defense::None;
    std::vector<TimedEvent> events;
};

// Throws InvalidArgument with the offending field in the message. `base` resolves
// relative topology file names.
ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
nlohmann::json to_json(const ScenarioSpec& s);
ScenarioSpec load_scenario(const std::filesystem::path& file);

// Built-in scenarios: ddos_basic, ddos_basic_active, ladder_maxperf, ladder_maxprot, no_attack.
ScenarioSpec builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenarios();

} // namespace sdnchain::scenario
