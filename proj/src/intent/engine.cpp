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


#include "sdnchain/intent/engine.hpp"

#include "sdnchain/core/error.hpp"
#include "sdnchain/ofwire/describe.hpp"

#include <algorithm>
#include <map>

namespace sdnchain::intent {

using guard::PlanStage;

namespace {

// Union of offenders seen so far in the incident; a limited link only shows a
// subset of the spoofed sources in any one window.
void merge_offenders(guard::Anomaly& acc, const guard::Anomaly& snap)
{
    std::map<std::uint32_t, double> src;
    for (const auto& s : acc.sources)
        src[s.src.value] = s.rate;
    for (const auto& s : snap.sources)
        src[s.src.value] = s.rate;
    std::map<std::pair<DatapathId, guard::FlowKey>, double> flows;
    for (const auto& f : acc.flows)
        flows[{f.switch_id, f.key}] = f.rate;
    for (const auto& f : snap.flows)
        flows[{f.switch_id, f.key}] = f.rate;
    acc.sources.clear();
    for (auto [ip, rate] : src)
        acc.sources.push_back({Ipv4Addr{ip}, rate});
    acc.flows.clear();
    for (const auto& [k, rate] : flows)
        acc.flows.push_back({k.first, k.second, rate});
    std::stable_sort(acc.sources.begin(), acc.sources.end(),
                     [](const auto& a, const auto& b) { return a.rate > b.rate; });
    std::stable_sort(acc.flows.begin(), acc.flows.end(),
                     [](const auto& a, const auto& b) { return a.rate > b.rate; });
    if (!snap.ports.empty())
        acc.ports = snap.ports;
    acc.window_end = std::max(acc.window_end, snap.window_end);
}

} // namespace

struct Engine::Incident {
    bool active = false;
    std::size_t step = 0;
    guard::Anomaly last;
    std::vector<guard::FlowOffender> detected;
    std::optional<RateLimit> limit;
    bool beyond_link = false;
    TimeUs provisioned_at = 0;
};

struct Engine::Record {
    Intent intent;
    ResolvedTarget target;
    std::vector<Policy> policies;
    std::vector<ValidationReport> reports;
    PlanStage stage = PlanStage::Stable;
    std::optional<std::string> error;
    Ladder ladder;
    Incident inc;
    std::optional<guard::Anomaly> pending;
    std::uint64_t next_policy = 1;

    bool traffic() const { return intent.verb == Verb::ProtectService || intent.verb == Verb::LimitTraffic; }
    std::string policy_id() { return intent.intent_id + "/p" + std::to_string(next_policy++); }
};

Engine::Engine(Scheduler& sched, chain::ChainService& chain, Fabric& fabric, const guard::Guard& guard,
               EngineConfig cfg, EventLog* events)
    : sched_(sched), chain_(chain), fabric_(fabric), guard_(guard), cfg_(std::move(cfg)), events_(events),
      alive_(std::make_shared<bool>(true))
{
}

Engine::~Engine()
{
    *alive_ = false;
}

Engine::Record& Engine::get(const std::string& id)
{
    auto it = records_.find(id);
    if (it == records_.end())
        throw Error(Errc::NotFound, "no intent " + id);
    return *it->second;
}

const Engine::Record& Engine::get(const std::string& id) const
{
    auto it = records_.find(id);
    if (it == records_.end())
        throw Error(Errc::NotFound, "no intent " + id);
    return *it->second;
}

void Engine::record_tx(chain::TxKind kind, const nlohmann::json& payload, int attempt)
{
    auto retry = [this, kind, payload, attempt, alive = alive_](const Error&) {
        if (!*alive)
            return;
        if (attempt >= cfg_.chain_retries) {
            ++chain_failures_;
            return;
        }
        sched_.after(cfg_.retry_delay, [this, kind, payload, attempt, alive] {
            if (*alive)
                record_tx(kind, payload, attempt + 1);
        });
    };
    try {
        chain_.submit(kind, to_bytes(payload.dump()), cfg_.submitter, {}, retry);
    } catch (const Error& e) {
        if (e.code() == Errc::ChainUnavailable || e.code() == Errc::ConsensusTimeout)
            retry(e);
        else
            ++chain_failures_;
    }
}

void Engine::emit(EventKind kind, nlohmann::json payload)
{
    if (events_)
        events_->append(kind, std::move(payload), rel_now());
}

void Engine::set_status(Record& r, IntentStatus s, const std::string& detail)
{
    r.intent.status = s;
    if (!detail.empty())
        r.error = detail;
    auto doc = to_json(r.intent);
    doc["at_us"] = rel_now();
    if (!detail.empty())
        doc["detail"] = detail;
    record_tx(chain::TxKind::Intent, doc);
    nlohmann::json ev{{"intent_id", r.intent.intent_id}, {"status", to_string(s)}, {"verb", to_string(r.intent.verb)},
                      {"target", r.intent.target}};
    if (!detail.empty())
        ev["detail"] = detail;
    emit(EventKind::IntentTransition, std::move(ev));
}

void Engine::set_stage(Record& r, PlanStage s)
{
    if (r.stage == s)
        return;
    auto from = r.stage;
    r.stage = s;
    emit(EventKind::IntentTransition, {{"intent_id", r.intent.intent_id},
                                       {"stage", guard::to_string(s)},
                                       {"from_stage", guard::to_string(from)}});
}

std::string Engine::submit(Intent in)
{
    auto target = resolve_target(fabric_.view(), in.target);
    auto rec = std::make_unique<Record>();
    in.intent_id = "intent-" + std::to_string(next_id_++);
    in.issued_at = rel_now();
    in.status = IntentStatus::Received;
    rec->intent = in;
    rec->target = target;
    rec->ladder = ladder_for(in.verb, in.preference);
    auto id = in.intent_id;
    auto& r = *rec;
    records_[id] = std::move(rec);
    order_.push_back(id);
    set_status(r, IntentStatus::Received);
    sched_.after(0, [this, id, alive = alive_] {
        if (*alive)
            translate_now(id);
    });
    return id;
}

void Engine::translate_now(const std::string& id)
{
    auto& r = get(id);
    if (r.intent.status != IntentStatus::Received)
        return;
    Policy p;
    try {
        p = translate(r.intent, fabric_.view(), r.policy_id());
    } catch (const Error& e) {
        set_status(r, IntentStatus::Failed, e.what());
        return;
    }
    set_status(r, IntentStatus::Translated);
    provision(r, std::move(p), [this, id](bool ok) {
        auto& rr = get(id);
        if (!ok)
            return;
        set_status(rr, IntentStatus::Provisioned);
        if (!rr.traffic()) {
            schedule_validation(id);
        } else if (rr.pending) {
            auto a = *rr.pending;
            rr.pending.reset();
            start_incident(rr, a);
        }
    });
}

void Engine::provision(Record& r, Policy p, std::function<void(bool)> done)
{
    r.policies.push_back(p);
    record_tx(chain::TxKind::Policy, to_json(p));
    auto kinds = nlohmann::json::array();
    for (const auto& a : p.actions)
        kinds.push_back(action_name(a));
    emit(EventKind::IntentTransition, {{"intent_id", r.intent.intent_id},
                                       {"policy_id", p.policy_id},
                                       {"stage", guard::to_string(p.stage)},
                                       {"actions", kinds}});
    run_actions(r.intent.intent_id, std::make_shared<Policy>(std::move(p)), 0, std::move(done));
}

void Engine::run_actions(const std::string& id, std::shared_ptr<Policy> p, std::size_t from,
                         std::function<void(bool)> done)
{
    auto& r = get(id);
    for (std::size_t i = from; i < p->actions.size(); ++i) {
        const auto& act = p->actions[i];
        try {
            if (const auto* ev = std::get_if<Evict>(&act)) {
                fabric_.evict(ev->element, "intent " + id);
            } else if (const auto* rm = std::get_if<Remap>(&act)) {
                fabric_.remap(rm->switch_id, rm->controller);
            } else if (const auto* fl = std::get_if<InstallFlow>(&act)) {
                fabric_.install_flow(fl->switch_id, fl->flow_mod);
                record_tx(chain::TxKind::FlowTable, {{"intent_id", id},
                                                     {"policy_id", p->policy_id},
                                                     {"switch_id", fl->switch_id},
                                                     {"flow_mod", ofwire::to_json(fl->flow_mod)}});
            } else if (const auto* rl = std::get_if<RateLimit>(&act)) {
                fabric_.rate_limit(rl->switch_id, rl->port, rl->pps);
            } else if (const auto* dt = std::get_if<Detect>(&act); dt && dt->duration > 0) {
                auto scope = dt->scope;
                sched_.after(dt->duration, [this, id, p, i, done, scope, alive = alive_] {
                    if (!*alive)
                        return;
                    auto& rr = get(id);
                    auto snap = guard_.snapshot(scope, rel_now());
                    if (!snap.flows.empty())
                        merge_offenders(rr.inc.last, snap);
                    rr.inc.detected = rr.inc.last.flows;
                    auto flows = nlohmann::json::array();
                    for (const auto& f : rr.inc.detected)
                        flows.push_back({{"switch_id", f.switch_id}, {"in_port", f.key.in_port},
                                         {"src", f.key.src.str()}, {"dst", f.key.dst.str()}, {"rate", f.rate}});
                    emit(EventKind::IntentTransition, {{"intent_id", id},
                                                       {"policy_id", p->policy_id},
                                                       {"action", "Detect"},
                                                       {"attacker_flows", flows}});
                    run_actions(id, p, i + 1, done);
                });
                return;
            }
        } catch (const Error& e) {
            ValidationReport rep;
            rep.intent_id = id;
            rep.window_start = rep.window_end = rel_now();
            rep.verdict = Verdict::NotMet;
            rep.stage = r.stage;
            rep.adjustments.push_back("PartialFailure at action " + std::to_string(i) + ": " + e.what());
            rep.metrics = {{"completed_actions", i}, {"failed_action", to_json(act)}};
            r.reports.push_back(rep);
            if (r.intent.status != IntentStatus::Validated)
                set_status(r, IntentStatus::Failed,
                           Error(Errc::PartialFailure, "action " + std::to_string(i) + ": " + e.what()).what());
            done(false);
            return;
        }
    }
    done(true);
}

void Engine::schedule_validation(const std::string& id)
{
    sched_.after(cfg_.validation_period, [this, id, alive = alive_] {
        if (*alive)
            validate_static(id);
    });
}

void Engine::validate_static(const std::string& id)
{
    auto& r = get(id);
    ValidationReport rep;
    rep.intent_id = id;
    rep.window_end = rel_now();
    rep.window_start = rep.window_end - cfg_.validation_period;
    bool met = true;
    std::size_t flows = 0, present = 0;
    for (const auto& p : r.policies)
        for (const auto& a : p.actions)
            if (const auto* fl = std::get_if<InstallFlow>(&a)) {
                ++flows;
                present += fabric_.flow_installed(fl->switch_id, fl->flow_mod);
            }
    met = present == flows;
    rep.metrics["flows_expected"] = flows;
    rep.metrics["flows_present"] = present;
    if (r.intent.verb == Verb::RemoveDevice) {
        bool gone = !fabric_.element_active(r.target.element);
        if (r.target.kind == TargetKind::Controller) {
            std::size_t still = 0;
            for (const auto& [dpid, c] : fabric_.view().mapping)
                still += c == r.target.element;
            rep.metrics["switches_still_mapped"] = still;
            gone = gone && still == 0;
        }
        rep.metrics["element_removed"] = gone;
        met = met && gone;
    }
    rep.verdict = met ? Verdict::Met : Verdict::NotMet;
    r.reports.push_back(rep);
    set_status(r, met ? IntentStatus::Validated : IntentStatus::Failed, met ? "" : "success predicate not met");
}

void Engine::on_anomaly(const guard::Anomaly& a)
{
    for (const auto& id : order_) {
        auto& r = *records_.at(id);
        if (!r.traffic() || r.target.address != a.victim || r.intent.status == IntentStatus::Failed)
            continue;
        if (r.intent.status == IntentStatus::Received || r.intent.status == IntentStatus::Translated) {
            r.pending = a;
        } else if (!r.inc.active) {
            start_incident(r, a);
        } else if (!a.flows.empty()) {
            r.inc.last = a;
        }
        return;
    }
    if (!cfg_.auto_defense)
        return;
    Intent in;
    in.verb = Verb::ProtectService;
    in.target = a.victim.str();
    in.preference = Preference::None;
    in.origin = "auto";
    auto id = submit(in);
    get(id).pending = a;
    translate_now(id);
}

void Engine::start_incident(Record& r, const guard::Anomaly& a)
{
    r.inc = Incident{};
    r.inc.active = true;
    r.inc.last = a;
    set_stage(r, PlanStage::AttackDetected);
    Policy p{r.policy_id(), r.intent.intent_id, PlanStage::AttackDetected, {Detect{r.target.address, 0}}};
    auto id = r.intent.intent_id;
    provision(r, std::move(p), [this, id](bool) { run_step(id, 0); });
}

guard::Anomaly Engine::offenders(Record& r)
{
    auto snap = guard_.snapshot(r.target.address, rel_now());
    if (!snap.flows.empty())
        merge_offenders(r.inc.last, snap);
    return r.inc.last;
}

void Engine::run_step(const std::string& id, std::size_t step)
{
    auto& r = get(id);
    r.inc.step = step;
    const auto s = r.ladder.steps.at(step);
    Policy p;
    try {
        switch (s.kind) {
        case LadderStep::Kind::Detect:
            p = Policy{r.policy_id(), id, r.stage, {Detect{r.target.address, cfg_.detect_duration}}};
            provision(r, std::move(p), [this, id, step](bool) { run_step(id, step + 1); });
            return;
        case LadderStep::Kind::Halve: {
            if (!r.inc.limit)
                throw Error(Errc::NoOffender, "no active link limit to tighten");
            RateLimit rl = *r.inc.limit;
            rl.pps /= 2;
            r.inc.limit = rl;
            p = Policy{r.policy_id(), id, s.stage, {rl}};
            break;
        }
        case LadderStep::Kind::Stage: {
            auto a = offenders(r);
            if (s.stage == PlanStage::IsolateAbnormalFlow && !r.inc.detected.empty())
                a.flows = r.inc.detected;
            p = stage_policy(id, r.policy_id(), s.stage, a, r.ladder.limit_fraction);
            for (const auto& act : p.actions)
                if (const auto* rl = std::get_if<RateLimit>(&act))
                    r.inc.limit = *rl;
            if (s.stage > PlanStage::LimitAbnormalLink)
                r.inc.beyond_link = true;
            break;
        }
        }
    } catch (const Error& e) {
        ValidationReport rep;
        rep.intent_id = id;
        rep.window_start = rep.window_end = rel_now();
        rep.verdict = Verdict::NotMet;
        rep.stage = r.stage;
        rep.adjustments.push_back(std::string("stage ") + std::string(guard::to_string(s.stage)) + " not provisioned: " + e.what());
        r.reports.push_back(rep);
        r.inc.provisioned_at = rel_now();
        sched_.after(cfg_.validation_period, [this, id, alive = alive_] {
            if (*alive)
                validate_traffic(id);
        });
        return;
    }
    set_stage(r, std::max(r.stage, s.stage));
    const std::size_t n_flows = std::count_if(p.actions.begin(), p.actions.end(),
                                              [](const auto& a) { return std::holds_alternative<InstallFlow>(a); });
    const std::size_t n_limits = p.actions.size() - n_flows;
    const auto policy_id = p.policy_id;
    const auto stage = s.stage;
    provision(r, std::move(p), [this, id, policy_id, stage, n_flows, n_limits](bool) {
        auto& rr = get(id);
        rr.inc.provisioned_at = rel_now();
        emit(EventKind::DefenseInstalled, {{"intent_id", id},
                                           {"policy_id", policy_id},
                                           {"stage", guard::to_string(stage)},
                                           {"victim", rr.target.address.str()},
                                           {"flow_mods", n_flows},
                                           {"rate_limits", n_limits}});
        sched_.after(cfg_.validation_period, [this, id, alive = alive_] {
            if (*alive)
                validate_traffic(id);
        });
    });
}

void Engine::validate_traffic(const std::string& id)
{
    auto& r = get(id);
    if (!r.inc.active)
        return;
    const auto* topo = fabric_.view().topology;
    const auto h = r.target.index;
    const auto dpid = topo->dpid(topo->host_switch(h));
    const auto port = topo->host_port(h);
    const TimeUs base_end = guard_.config().baseline_period;
    const double baseline = guard_.port_packet_rate(dpid, port, guard::SampleKind::PortTx, 0, base_end);
    const double threshold = cfg_.success_factor * std::max(baseline, cfg_.baseline_floor);

    ValidationReport rep;
    rep.intent_id = id;
    rep.window_start = r.inc.provisioned_at;
    rep.window_end = rel_now();
    rep.stage = r.stage;
    bool met = true;
    auto rates = nlohmann::json::array();
    for (TimeUs t = rep.window_start; t < rep.window_end; t += cfg_.subwindow) {
        double rate = guard_.port_packet_rate(dpid, port, guard::SampleKind::PortTx, t,
                                              std::min(t + cfg_.subwindow, rep.window_end));
        rates.push_back(rate);
        met = met && rate <= threshold;
    }
    rep.metrics = {{"victim", r.target.address.str()},
                   {"victim_link_pps", rates},
                   {"baseline_pps", baseline},
                   {"threshold_pps", threshold},
                   {"packet_in_rate", guard_.packet_in_rate(r.target.address, rel_now())}};
    rep.attacker_flows = r.inc.detected;

    const auto move = next_move(r.ladder, r.inc.step, met);
    if (move.kind == LadderMove::Kind::Resolve) {
        rep.verdict = Verdict::Met;
        r.reports.push_back(rep);
        r.inc.active = false;
        std::vector<PolicyAction> acts;
        if (r.inc.limit && r.inc.beyond_link)
            acts.push_back(RateLimit{r.inc.limit->switch_id, r.inc.limit->port, 0});
        set_stage(r, PlanStage::Stable);
        Policy p{r.policy_id(), id, PlanStage::Stable, std::move(acts)};
        provision(r, std::move(p), [this, id](bool) {
            auto& rr = get(id);
            if (rr.intent.status == IntentStatus::Provisioned)
                set_status(rr, IntentStatus::Validated);
        });
        return;
    }
    const auto& next = r.ladder.steps.at(move.next);
    rep.verdict = met ? Verdict::Met : Verdict::Adjusted;
    std::string what = next.kind == LadderStep::Kind::Detect  ? "run Detect"
                     : next.kind == LadderStep::Kind::Halve   ? "halve the link limit"
                     : move.kind == LadderMove::Kind::Repeat ? "re-provision " + std::string(guard::to_string(next.stage))
                                                              : "escalate to " + std::string(guard::to_string(next.stage));
    if (next.mandatory && met)
        what += " (scheduled)";
    rep.adjustments.push_back(what);
    r.reports.push_back(rep);
    run_step(id, move.next);
}

std::optional<Intent> Engine::intent(const std::string& id) const
{
    auto it = records_.find(id);
    if (it == records_.end())
        return std::nullopt;
    return it->second->intent;
}

std::vector<Intent> Engine::intents() const
{
    std::vector<Intent> out;
    for (const auto& id : order_)
        out.push_back(records_.at(id)->intent);
    return out;
}

const std::vector<ValidationReport>& Engine::reports(const std::string& id) const
{
    return get(id).reports;
}

const std::vector<Policy>& Engine::policies(const std::string& id) const
{
    return get(id).policies;
}

PlanStage Engine::stage(const std::string& id) const
{
    return get(id).stage;
}

std::optional<std::string> Engine::error(const std::string& id) const
{
    return get(id).error;
}

nlohmann::json intent_document(const Engine& e, const std::string& id)
{
    auto in = e.intent(id);
    if (!in)
        throw Error(Errc::NotFound, "no intent " + id);
    auto j = to_json(*in);
    j["stage"] = guard::to_string(e.stage(id));
    auto policies = nlohmann::json::array();
    for (const auto& p : e.policies(id))
        policies.push_back(to_json(p));
    j["policies"] = policies;
    auto reports = nlohmann::json::array();
    for (const auto& r : e.reports(id))
        reports.push_back(to_json(r));
    j["reports"] = reports;
    if (auto err = e.error(id))
        j["error"] = *err;
    return j;
}

} // namespace sdnchain::intent
