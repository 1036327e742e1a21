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


#include "sdnchain/intent/translate.hpp"

#include "sdnchain/core/error.hpp"
#include "sdnchain/mw/middleware.hpp"

#include <algorithm>

namespace sdnchain::intent {

using guard::PlanStage;

ResolvedTarget resolve_target(const View& view, const std::string& target)
{
    if (!view.topology)
        throw Error(Errc::InvalidArgument, "view has no topology");
    const auto& topo = *view.topology;
    ResolvedTarget r;
    if (std::find(view.controllers.begin(), view.controllers.end(), target) != view.controllers.end()) {
        r.kind = TargetKind::Controller;
        r.element = target;
        return r;
    }
    std::optional<std::size_t> sw = topo.switch_by_name(target);
    if (!sw)
        if (auto dpid = mw::parse_switch_element_id(target))
            sw = topo.switch_index(*dpid);
    if (sw) {
        r.kind = TargetKind::Switch;
        r.index = *sw;
        r.switch_id = topo.dpid(*sw);
        r.element = mw::switch_element_id(r.switch_id);
        return r;
    }
    std::optional<std::size_t> host = topo.host_by_name(target);
    if (!host) {
        try {
            host = topo.host_by_ip(Ipv4Addr::parse(target));
        } catch (const Error&) {
        }
    }
    if (host) {
        r.kind = TargetKind::Host;
        r.index = *host;
        r.address = topo.host(*host).ip;
        return r;
    }
    throw Error(Errc::UnknownTarget, "no controller, switch or host named " + target);
}

std::vector<InstallFlow> recalculate_paths(const simnet::Topology& topo, std::size_t avoid,
                                           const std::set<std::size_t>& already_removed)
{
    std::vector<InstallFlow> out;
    auto excluded = already_removed;
    excluded.insert(avoid);
    for (std::size_t a = 0; a < topo.host_count(); ++a) {
        for (std::size_t b = 0; b < topo.host_count(); ++b) {
            const auto sa = topo.host_switch(a), sb = topo.host_switch(b);
            if (a == b || sa == avoid || sb == avoid)
                continue;
            auto old_path = topo.shortest_path(sa, sb, already_removed);
            if (std::find(old_path.begin(), old_path.end(), avoid) == old_path.end())
                continue;
            auto path = topo.shortest_path(sa, sb, excluded);
            if (path.empty())
                continue;
            // Downstream first so the first frames never meet a half-built path.
            for (std::size_t i = path.size(); i-- > 0;) {
                ofwire::FlowMod fm;
                fm.cookie = kRecalcCookie;
                fm.command = ofwire::FlowModCommand::Add;
                fm.match.eth_src = topo.host(a).mac;
                fm.match.eth_dst = topo.host(b).mac;
                fm.priority = kRecalcPriority;
                std::uint32_t port = i + 1 < path.size() ? topo.port_toward(path[i], path[i + 1]) : topo.host_port(b);
                fm.actions.push_back({port});
                out.push_back({topo.dpid(path[i]), std::move(fm)});
            }
        }
    }
    return out;
}

namespace {

std::set<std::size_t> removed_indices(const View& view)
{
    std::set<std::size_t> out;
    for (auto dpid : view.removed)
        if (auto i = view.topology->switch_index(dpid))
            out.insert(*i);
    return out;
}

} // namespace

Policy translate(const Intent& intent, const View& view, const std::string& policy_id)
{
    const auto target = resolve_target(view, intent.target);
    Policy p;
    p.policy_id = policy_id;
    p.intent_id = intent.intent_id;
    p.stage = PlanStage::Stable;
    const auto removed = removed_indices(view);
    switch (intent.verb) {
    case Verb::RemoveDevice:
        if (target.kind == TargetKind::Controller) {
            std::vector<std::string> survivors;
            for (const auto& c : view.controllers)
                if (c != target.element)
                    survivors.push_back(c);
            if (survivors.empty())
                throw Error(Errc::NoFeasiblePolicy, "no controller would remain after removing " + target.element);
            std::sort(survivors.begin(), survivors.end());
            std::map<std::string, std::size_t> load;
            for (const auto& c : survivors)
                load[c] = 0;
            for (const auto& [dpid, c] : view.mapping)
                if (load.count(c))
                    ++load[c];
            p.actions.push_back(Evict{target.element});
            for (const auto& [dpid, c] : view.mapping) {
                if (c != target.element)
                    continue;
                auto best = survivors.front();
                for (const auto& s : survivors)
                    if (load[s] < load[best])
                        best = s;
                ++load[best];
                p.actions.push_back(Remap{dpid, best});
            }
            return p;
        }
        if (target.kind == TargetKind::Switch) {
            if (removed.count(target.index))
                throw Error(Errc::NoFeasiblePolicy, target.element + " is already out of service");
            p.actions.push_back(Evict{target.element});
            for (auto& f : recalculate_paths(*view.topology, target.index, removed))
                p.actions.push_back(std::move(f));
            return p;
        }
        throw Error(Errc::NoFeasiblePolicy, "hosts cannot be removed: " + intent.target);
    case Verb::RecalculatePaths:
        if (target.kind != TargetKind::Switch)
            throw Error(Errc::NoFeasiblePolicy, "paths can only be recalculated around a switch");
        for (auto& f : recalculate_paths(*view.topology, target.index, removed))
            p.actions.push_back(std::move(f));
        return p;
    case Verb::ProtectService:
    case Verb::LimitTraffic:
        if (target.kind != TargetKind::Host)
            throw Error(Errc::NoFeasiblePolicy, "traffic intents need a host target");
        p.actions.push_back(Detect{target.address, 0});
        return p;
    }
    throw Error(Errc::InvalidArgument, "unhandled verb");
}

Ladder ladder_for(Verb verb, Preference pref)
{
    using K = LadderStep::Kind;
    Ladder l;
    if (verb == Verb::LimitTraffic) {
        l.limit_fraction = pref == Preference::MaxProtection ? 0.5 : 0.05;
        l.steps = {{K::Stage, PlanStage::LimitAbnormalLink}, {K::Halve, PlanStage::LimitAbnormalLink}};
        return l;
    }
    switch (pref) {
    case Preference::MaxPerformance:
        l.limit_fraction = 0.05;
        l.steps = {{K::Stage, PlanStage::LimitAbnormalLink},
                   {K::Stage, PlanStage::LimitAbnormalIp},
                   {K::Stage, PlanStage::IsolateAbnormalFlow}};
        break;
    case Preference::MaxProtection:
        l.limit_fraction = 0.5;
        l.steps = {{K::Stage, PlanStage::LimitAbnormalLink},
                   {K::Detect, PlanStage::LimitAbnormalLink},
                   {K::Stage, PlanStage::LimitAbnormalIp},
                   {K::Stage, PlanStage::IsolateAbnormalFlow, true}};
        break;
    case Preference::None:
        l.steps = {{K::Stage, PlanStage::IsolateAbnormalFlow}};
        break;
    }
    return l;
}

LadderMove next_move(const Ladder& ladder, std::size_t at, bool met)
{
    const bool has_next = at + 1 < ladder.steps.size();
    if (met) {
        if (has_next && ladder.steps[at + 1].mandatory)
            return {LadderMove::Kind::Advance, at + 1};
        return {LadderMove::Kind::Resolve, at};
    }
    if (has_next)
        return {LadderMove::Kind::Advance, at + 1};
    return {LadderMove::Kind::Repeat, at};
}

Policy stage_policy(const std::string& intent_id, const std::string& policy_id, PlanStage stage,
                    const guard::Anomaly& a, double limit_fraction)
{
    Policy p;
    p.policy_id = policy_id;
    p.intent_id = intent_id;
    p.stage = stage;
    auto d = guard::synthesize_defense(a, stage, limit_fraction);
    for (const auto& rl : d.rate_limits)
        p.actions.push_back(RateLimit{rl.switch_id, rl.port, rl.pps});
    for (auto& f : d.flows)
        p.actions.push_back(InstallFlow{f.switch_id, std::move(f.flow_mod)});
    return p;
}

} // namespace sdnchain::intent
