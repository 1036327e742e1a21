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

#include "sdnchain/core/net.hpp"
#include "sdnchain/core/scheduler.hpp"
#include "sdnchain/guard/guard.hpp"
#include "sdnchain/ofwire/message.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace sdnchain::intent {

enum class Verb { RemoveDevice, RecalculatePaths, ProtectService, LimitTraffic };
enum class Preference { MaxPerformance, MaxProtection, None };
enum class IntentStatus { Received = 0, Translated = 1, Provisioned = 2, Validated = 3, Failed = 4 };
enum class Verdict { Met, NotMet, Adjusted };

std::string_view to_string(Verb v);
std::string_view to_string(Preference p);
std::string_view to_string(IntentStatus s);
std::string_view to_string(Verdict v);
Verb parse_verb(std::string_view s);             // throws InvalidArgument
Preference parse_preference(std::string_view s); // throws InvalidArgument
IntentStatus parse_status(std::string_view s);

struct Intent {
    std::string intent_id;
    Verb verb = Verb::ProtectService;
    std::string target;
    Preference preference = Preference::None;
    TimeUs issued_at = 0;
    IntentStatus status = IntentStatus::Received;
    std::string origin = "operator"; // "operator" or "auto"
};

nlohmann::json to_json(const Intent& i);
// Reads verb/target/preference; id, time and status are assigned by the engine.
Intent intent_from_json(const nlohmann::json& j);

struct Evict {
    std::string element;
    bool operator==(const Evict&) const = default;
};

struct Remap {
    DatapathId switch_id = 0;
    std::string controller;
    bool operator==(const Remap&) const = default;
};

struct InstallFlow {
    DatapathId switch_id = 0;
    ofwire::FlowMod flow_mod;
    bool operator==(const InstallFlow&) const = default;
};

// Policer on one switch port. pps <= 0 removes it.
struct RateLimit {
    DatapathId switch_id = 0;
    std::uint32_t port = 0;
    double pps = 0;
    bool operator==(const RateLimit&) const = default;
};

// Observe traffic toward scope for duration and record the offending flows.
// A zero duration arms continuous monitoring.
struct Detect {
    Ipv4Addr scope;
    TimeUs duration = 0;
    bool operator==(const Detect&) const = default;
};

using PolicyAction = std::variant<Evict, Remap, InstallFlow, RateLimit, Detect>;

std::string_view action_name(const PolicyAction& a);
nlohmann::json to_json(const PolicyAction& a);

struct Policy {
    std::string policy_id;
    std::string intent_id;
    guard::PlanStage stage = guard::PlanStage::Stable;
    std::vector<PolicyAction> actions;

    bool operator==(const Policy&) const = default;
};

nlohmann::json to_json(const Policy& p);

struct ValidationReport {
    std::string intent_id;
    TimeUs window_start = 0;
    TimeUs window_end = 0;
    nlohmann::json metrics = nlohmann::json::object();
    Verdict verdict = Verdict::NotMet;
    std::vector<std::string> adjustments;
    guard::PlanStage stage = guard::PlanStage::Stable;
    std::vector<guard::FlowOffender> attacker_flows;
};

nlohmann::json to_json(const ValidationReport& r);

} // namespace sdnchain::intent
