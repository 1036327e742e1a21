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

#include "sdnchain/intent/intent.hpp"
#include "sdnchain/simnet/topology.hpp"

#include <map>
#include <optional>
#include <set>

namespace sdnchain::intent {

// What translation may look at. Built by the fabric at translation time.
struct View {
    const simnet::Topology* topology = nullptr;
    std::map<DatapathId, std::string> mapping;
    std::vector<std::string> controllers; // connected and registered
    std::set<DatapathId> removed;         // switches already taken out of service
};

enum class TargetKind { Controller, Switch, Host };

struct ResolvedTarget {
    TargetKind kind = TargetKind::Host;
    std::string element;      // controller id or switch element id
    std::size_t index = 0;    // switch or host index in the topology
    DatapathId switch_id = 0; // for switches
    Ipv4Addr address;         // for hosts
};

// Accepts a controller id, a switch name, a switch element id, a host name or a
// host address. Throws UnknownTarget.
ResolvedTarget resolve_target(const View& view, const std::string& target);

constexpr std::uint16_t kRecalcPriority = 20;
constexpr std::uint64_t kRecalcCookie = 0x7e0a0000;

// Forwarding entries for every host pair whose current shortest path crosses
// `avoid`, rerouted along the shortest path that excludes it. Pairs with an
// endpoint on `avoid` or without an alternative are skipped.
std::vector<InstallFlow> recalculate_paths(const simnet::Topology& topo, std::size_t avoid,
                                           const std::set<std::size_t>& already_removed = {});

// Pure mapping from (intent, view) to the first policy. Throws UnknownTarget
// and NoFeasiblePolicy.
Policy translate(const Intent& intent, const View& view, const std::string& policy_id);

// Escalation schedule for traffic intents.
struct LadderStep {
    enum class Kind { Stage, Detect, Halve };
    Kind kind = Kind::Stage;
    guard::PlanStage stage = guard::PlanStage::LimitAbnormalLink;
    bool mandatory = false; // taken even when the previous step met the predicate
};

struct Ladder {
    double limit_fraction = 0.05;
    std::vector<LadderStep> steps;
};

Ladder ladder_for(Verb verb, Preference pref);

struct LadderMove {
    enum class Kind { Resolve, Advance, Repeat };
    Kind kind = Kind::Resolve;
    std::size_t next = 0; // step index for Advance/Repeat
};

// Decides what follows a validation of step `at`.
LadderMove next_move(const Ladder& ladder, std::size_t at, bool met);

// Defense policy for one ladder stage from the offenders in `a`.
Policy stage_policy(const std::string& intent_id, const std::string& policy_id, guard::PlanStage stage,
                    const guard::Anomaly& a, double limit_fraction);

} // namespace sdnchain::intent
