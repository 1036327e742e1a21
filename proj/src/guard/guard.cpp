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


#include "sdnchain/guard/guard.hpp"

#include "sdnchain/core/error.hpp"

#include <algorithm>
#include <set>

namespace sdnchain::guard {

std::string_view to_string(PlanStage s)
{
    switch (s) {
    case PlanStage::Stable: return "Stable";
    case PlanStage::AttackDetected: return "AttackDetected";
    case PlanStage::LimitAbnormalLink: return "LimitAbnormalLink";
    case PlanStage::LimitAbnormalIp: return "LimitAbnormalIp";
    case PlanStage::IsolateAbnormalFlow: return "IsolateAbnormalFlow";
    }
    return "?";
}

PlanStage parse_plan_stage(std::string_view s)
{
    for (int i = 1; i <= 5; ++i)
        if (to_string(static_cast<PlanStage>(i)) == s)
            return static_cast<PlanStage>(i);
    throw Error(Errc::InvalidArgument, "unknown plan stage: " + std::string(s));
}

Guard::Guard(GuardConfig cfg) : cfg_(cfg) { }

bool Guard::ingest(const TrafficSample& s)
{
    if (s.timestamp_us < latest_ - cfg_.window) {
        ++stale_;
        return false;
    }
    latest_ = std::max(latest_, s.timestamp_us);
    if (s.kind == SampleKind::PacketIn) {
        if (!s.flow) {
            ++stale_;
            return false;
        }
        window_.push_back(s);
        if (s.timestamp_us <= cfg_.baseline_period)
            baseline_counts_[s.flow->dst.value] += s.packet_count;
        while (!window_.empty() && window_.front().timestamp_us <= latest_ - cfg_.window)
            window_.pop_front();
    } else {
        ports_[{s.switch_id, s.port, static_cast<int>(s.kind)}].points.push_back({s.timestamp_us, {s.packet_count, s.byte_count}});
    }
    return true;
}

double Guard::window_rate(std::uint32_t victim, TimeUs now) const
{
    std::uint64_t n = 0;
    for (const auto& s : window_)
        if (s.flow->dst.value == victim && s.timestamp_us > now - cfg_.window && s.timestamp_us <= now)
            n += s.packet_count;
    return static_cast<double>(n) / to_seconds(cfg_.window);
}

double Guard::packet_in_rate(Ipv4Addr victim, TimeUs now) const
{
    return window_rate(victim.value, now);
}

double Guard::baseline(Ipv4Addr victim) const
{
    auto it = baseline_counts_.find(victim.value);
    double n = it == baseline_counts_.end() ? 0.0 : static_cast<double>(it->second);
    return n / to_seconds(cfg_.baseline_period);
}

std::vector<Anomaly> Guard::detect(TimeUs now)
{
    std::vector<Anomaly> raised;
    if (now < cfg_.baseline_period)
        return raised;
    std::set<std::uint32_t> dsts;
    for (const auto& s : window_)
        dsts.insert(s.flow->dst.value);
    for (const auto& [v, id] : active_)
        dsts.insert(v);
    for (const auto& [v, t] : above_since_)
        dsts.insert(v);
    for (auto v : dsts) {
        double rate = window_rate(v, now);
        double thr = cfg_.k * std::max(baseline(Ipv4Addr{v}), cfg_.baseline_floor);
        if (rate <= thr) {
            above_since_.erase(v);
            active_.erase(v);
            continue;
        }
        auto since = above_since_.emplace(v, now).first->second;
        if (now - since >= cfg_.sustain && !active_.count(v)) {
            auto a = snapshot(Ipv4Addr{v}, now);
            a.id = next_id_++;
            active_[v] = a.id;
            raised.push_back(std::move(a));
        }
    }
    return raised;
}

Anomaly Guard::snapshot(Ipv4Addr victim, TimeUs now) const
{
    Anomaly a;
    a.victim = victim;
    a.window_start = now - cfg_.window;
    a.window_end = now;
    a.baseline = baseline(victim);
    std::map<std::pair<DatapathId, std::uint32_t>, std::uint64_t> by_port;
    std::map<std::uint32_t, std::uint64_t> by_src;
    std::map<std::pair<DatapathId, FlowKey>, std::uint64_t> by_flow;
    std::uint64_t total = 0;
    for (const auto& s : window_) {
        if (s.flow->dst != victim || s.timestamp_us <= a.window_start || s.timestamp_us > now)
            continue;
        by_port[{s.switch_id, s.flow->in_port}] += s.packet_count;
        by_src[s.flow->src.value] += s.packet_count;
        by_flow[{s.switch_id, *s.flow}] += s.packet_count;
        total += s.packet_count;
    }
    const double w = to_seconds(cfg_.window);
    a.rate = static_cast<double>(total) / w;
    for (const auto& [k, n] : by_port)
        a.ports.push_back({k.first, k.second, static_cast<double>(n) / w});
    for (const auto& [k, n] : by_src)
        a.sources.push_back({Ipv4Addr{k}, static_cast<double>(n) / w});
    for (const auto& [k, n] : by_flow)
        a.flows.push_back({k.first, k.second, static_cast<double>(n) / w});
    // Stable sorts keep the key order among equal rates.
    std::stable_sort(a.ports.begin(), a.ports.end(), [](const auto& x, const auto& y) { return x.rate > y.rate; });
    std::stable_sort(a.sources.begin(), a.sources.end(), [](const auto& x, const auto& y) { return x.rate > y.rate; });
    std::stable_sort(a.flows.begin(), a.flows.end(), [](const auto& x, const auto& y) { return x.rate > y.rate; });
    return a;
}

namespace {

std::pair<std::uint64_t, std::uint64_t> series_sum(
    const std::vector<std::pair<TimeUs, std::pair<std::uint64_t, std::uint64_t>>>& pts, TimeUs from, TimeUs to)
{
    std::uint64_t p = 0, b = 0;
    auto it = std::upper_bound(pts.begin(), pts.end(), from, [](TimeUs t, const auto& e) { return t < e.first; });
    for (; it != pts.end() && it->first <= to; ++it) {
        p += it->second.first;
        b += it->second.second;
    }
    return {p, b};
}

} // namespace

double Guard::port_packet_rate(DatapathId sw, std::uint32_t port, SampleKind kind, TimeUs from, TimeUs to) const
{
    auto it = ports_.find({sw, port, static_cast<int>(kind)});
    if (it == ports_.end() || to <= from)
        return 0;
    return static_cast<double>(series_sum(it->second.points, from, to).first) / to_seconds(to - from);
}

double Guard::port_byte_rate(DatapathId sw, std::uint32_t port, SampleKind kind, TimeUs from, TimeUs to) const
{
    auto it = ports_.find({sw, port, static_cast<int>(kind)});
    if (it == ports_.end() || to <= from)
        return 0;
    return static_cast<double>(series_sum(it->second.points, from, to).second) / to_seconds(to - from);
}

Defense synthesize_defense(const Anomaly& a, PlanStage stage, double limit_fraction)
{
    if (a.ports.empty() || a.sources.empty() || a.flows.empty())
        throw Error(Errc::NoOffender, "anomaly has no offenders");
    if (stage < PlanStage::LimitAbnormalLink)
        throw Error(Errc::InvalidArgument, "no defense below the link-limit stage");
    Defense d;
    const std::uint64_t cookie = 0xdefe0000ull | static_cast<std::uint64_t>(stage);
    auto drop_rule = [&](ofwire::MatchFields m, std::uint16_t prio) {
        ofwire::FlowMod fm;
        fm.cookie = cookie;
        fm.command = ofwire::FlowModCommand::Add;
        fm.match = std::move(m);
        fm.priority = prio;
        fm.idle_timeout = kDefenseIdleTimeout;
        return fm;
    };
    switch (stage) {
    case PlanStage::LimitAbnormalLink: {
        const auto& top = a.ports.front();
        d.rate_limits.push_back({top.switch_id, top.in_port, top.rate * limit_fraction});
        break;
    }
    case PlanStage::LimitAbnormalIp: {
        std::set<std::pair<DatapathId, std::uint32_t>> seen;
        for (const auto& src : a.sources)
            for (const auto& f : a.flows)
                if (f.key.src == src.src && seen.insert({f.switch_id, src.src.value}).second) {
                    ofwire::MatchFields m;
                    m.ipv4_src = ofwire::Ipv4Prefix{src.src, 32};
                    d.flows.push_back({f.switch_id, drop_rule(m, kDefensePriority)});
                }
        break;
    }
    default: {
        for (const auto& f : a.flows) {
            ofwire::MatchFields m;
            m.in_port = f.key.in_port;
            m.ipv4_src = ofwire::Ipv4Prefix{f.key.src, 32};
            m.ipv4_dst = ofwire::Ipv4Prefix{f.key.dst, 32};
            d.flows.push_back({f.switch_id, drop_rule(m, kDefensePriority + 1)});
        }
        break;
    }
    }
    return d;
}

void WorkLog::add(TimeUs start, TimeUs end)
{
    if (end <= start)
        return;
    if (!ends_.empty() && start < ends_.back())
        throw Error(Errc::InvariantViolation, "work intervals overlap");
    if (!ends_.empty() && start == ends_.back()) {
        ends_.back() = end;
        return;
    }
    TimeUs before = prefix_.empty() ? 0 : prefix_.back() + (ends_.back() - starts_.back());
    starts_.push_back(start);
    ends_.push_back(end);
    prefix_.push_back(before);
}

TimeUs WorkLog::busy(TimeUs from, TimeUs to) const
{
    if (to <= from || starts_.empty())
        return 0;
    auto i0 = static_cast<std::size_t>(std::upper_bound(ends_.begin(), ends_.end(), from) - ends_.begin());
    auto i1 = static_cast<std::size_t>(std::lower_bound(starts_.begin(), starts_.end(), to) - starts_.begin());
    if (i0 >= i1)
        return 0;
    TimeUs total = prefix_[i1 - 1] + (ends_[i1 - 1] - starts_[i1 - 1]) - prefix_[i0];
    total -= std::max<TimeUs>(0, from - starts_[i0]);
    total -= std::max<TimeUs>(0, ends_[i1 - 1] - to);
    return total;
}

double controller_load(const WorkLog& log, TimeUs from, TimeUs to)
{
    if (to <= from)
        return 0;
    return std::clamp(static_cast<double>(log.busy(from, to)) / static_cast<double>(to - from), 0.0, 1.0);
}

TimeUs ServiceQueue::arrive(TimeUs at)
{
    TimeUs start = std::max(at, busy_until_);
    busy_until_ = start + service_;
    log_.add(start, busy_until_);
    return busy_until_;
}

} // namespace sdnchain::guard
