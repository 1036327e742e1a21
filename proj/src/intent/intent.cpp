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


#include "sdnchain/intent/intent.hpp"

#include "sdnchain/core/error.hpp"
#include "sdnchain/ofwire/describe.hpp"

namespace sdnchain::intent {

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& all, const char* what)
{
    for (auto e : all)
        if (to_string(e) == s)
            return e;
    throw Error(Errc::InvalidArgument, std::string("unknown ") + what + ": " + std::string(s));
}

nlohmann::json offender_json(const guard::FlowOffender& f)
{
    return {{"switch_id", f.switch_id},
            {"in_port", f.key.in_port},
            {"src", f.key.src.str()},
            {"dst", f.key.dst.str()},
            {"rate", f.rate}};
}

} // namespace

std::string_view to_string(Verb v)
{
    switch (v) {
    case Verb::RemoveDevice: return "RemoveDevice";
    case Verb::RecalculatePaths: return "RecalculatePaths";
    case Verb::ProtectService: return "ProtectService";
    case Verb::LimitTraffic: return "LimitTraffic";
    }
    return "?";
}

std::string_view to_string(Preference p)
{
    switch (p) {
    case Preference::MaxPerformance: return "MaxPerformance";
    case Preference::MaxProtection: return "MaxProtection";
    case Preference::None: return "None";
    }
    return "?";
}

std::string_view to_string(IntentStatus s)
{
    switch (s) {
    case IntentStatus::Received: return "Received";
    case IntentStatus::Translated: return "Translated";
    case IntentStatus::Provisioned: return "Provisioned";
    case IntentStatus::Validated: return "Validated";
    case IntentStatus::Failed: return "Failed";
    }
    return "?";
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Met: return "Met";
    case Verdict::NotMet: return "NotMet";
    case Verdict::Adjusted: return "Adjusted";
    }
    return "?";
}

Verb parse_verb(std::string_view s)
{
    return parse_enum(s, std::array{Verb::RemoveDevice, Verb::RecalculatePaths, Verb::ProtectService, Verb::LimitTraffic},
                      "verb");
}

Preference parse_preference(std::string_view s)
{
    return parse_enum(s, std::array{Preference::MaxPerformance, Preference::MaxProtection, Preference::None},
                      "preference");
}

IntentStatus parse_status(std::string_view s)
{
    return parse_enum(s,
                      std::array{IntentStatus::Received, IntentStatus::Translated, IntentStatus::Provisioned,
                                 IntentStatus::Validated, IntentStatus::Failed},
                      "status");
}

nlohmann::json to_json(const Intent& i)
{
    return {{"intent_id", i.intent_id},
            {"verb", to_string(i.verb)},
            {"target", i.target},
            {"preference", to_string(i.preference)},
            {"issued_at", i.issued_at},
            {"status", to_string(i.status)},
            {"origin", i.origin}};
}

Intent intent_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw Error(Errc::InvalidArgument, "intent must be an object");
    auto str = [&j](const char* key) -> std::string {
        if (!j.contains(key) || !j.at(key).is_string())
            throw Error(Errc::InvalidArgument, std::string("intent field '") + key + "' must be a string");
        return j.at(key).get<std::string>();
    };
    Intent in;
    in.verb = parse_verb(str("verb"));
    in.target = str("target");
    if (in.target.empty())
        throw Error(Errc::InvalidArgument, "intent target is empty");
    if (j.contains("preference"))
        in.preference = parse_preference(str("preference"));
    return in;
}

std::string_view action_name(const PolicyAction& a)
{
    static constexpr std::string_view names[] = {"Evict", "Remap", "InstallFlow", "RateLimit", "Detect"};
    return names[a.index()];
}

nlohmann::json to_json(const PolicyAction& a)
{
    nlohmann::json j{{"type", action_name(a)}};
    std::visit(
        [&j](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Evict>) {
                j["element"] = x.element;
            } else if constexpr (std::is_same_v<T, Remap>) {
                j["switch_id"] = x.switch_id;
                j["controller"] = x.controller;
            } else if constexpr (std::is_same_v<T, InstallFlow>) {
                j["switch_id"] = x.switch_id;
                j["flow_mod"] = ofwire::to_json(x.flow_mod);
            } else if constexpr (std::is_same_v<T, RateLimit>) {
                j["switch_id"] = x.switch_id;
                j["port"] = x.port;
                j["pps"] = x.pps;
            } else {
                j["scope"] = x.scope.str();
                j["duration_us"] = x.duration;
            }
        },
        a);
    return j;
}

nlohmann::json to_json(const Policy& p)
{
    auto acts = nlohmann::json::array();
    for (const auto& a : p.actions)
        acts.push_back(to_json(a));
    return {{"policy_id", p.policy_id}, {"intent_id", p.intent_id}, {"stage", guard::to_string(p.stage)}, {"actions", acts}};
}

nlohmann::json to_json(const ValidationReport& r)
{
    auto flows = nlohmann::json::array();
    for (const auto& f : r.attacker_flows)
        flows.push_back(offender_json(f));
    return {{"intent_id", r.intent_id},
            {"window", {{"start_us", r.window_start}, {"end_us", r.window_end}}},
            {"metrics", r.metrics},
            {"verdict", to_string(r.verdict)},
            {"adjustments", r.adjustments},
            {"stage", guard::to_string(r.stage)},
            {"attacker_flows", flows}};
}

} // namespace sdnchain::intent
