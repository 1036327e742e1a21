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

#include "sdnchain/scenario/runtime.hpp"

#include <filesystem>

namespace sdnchain::scenario {

struct ScenarioResult {
    ScenarioSpec spec;
    MetricsTrace trace;
    std::vector<ApiEvent> events;
    std::string chain_export; // newline-delimited blocks
    nlohmann::json summary;
};

// Deterministic for a fixed spec. `sink` sees every event as it is appended.
ScenarioResult run_scenario(const ScenarioSpec& spec, EventLog::Sink sink = {}, RuntimeOptions opts = {});

// metrics.csv, events.ndjson, chain.ndjson, summary.json
void write_outputs(const ScenarioResult& r, const std::filesystem::path& dir);

// Mean packet_in rate over [from_s, to_s] and the peak over the whole run.
double mean_packet_in_rate(const MetricsTrace& t, double from_s, double to_s);
double mean_controller_load(const MetricsTrace& t, double from_s, double to_s);
double peak_packet_in_rate(const MetricsTrace& t);

} // namespace sdnchain::scenario
