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
#include "sdnchain/ofwire/message.hpp"

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdnchain::guard {

// Defense ladder. Escalation only moves forward within one incident.
enum class PlanStage { Stable = 1, AttackDetected = 2, LimitAbnormalLink = 3, LimitAbnormalIp = 4, IsolateAbnormalFlow = 5 };

std::string_view to_string(PlanStage s);
PlanStage parse_plan_stage(std::string_view s);

enum class SampleKind { PacketIn, PortTx, PortRx };

struct FlowKey {
    std::uint32_t in_port = 0;
    Ipv4Addr src;
    Ipv4Addr dst;

    auto operator<=>(const FlowKey&) const = default;
};

// Exact per-interval counters pushed by a switch.
struct TrafficSample {
    DatapathId switch_id = 0;
    std::uint32_t port = 0;
    SampleKind kind = SampleKind::PortTx;
    std::uint64_t byte_count = 0;
    std::uint64_t packet_count = 0;
    std::optional<FlowKey> flow; // PacketIn samples
    TimeUs timestamp_us = 0;
};

struct GuardConfig {
    TimeUs window = kSec;
    TimeUs baseline_period = 2 * kSec;
    double k = 5.0;
    TimeUs sustain = kSec;
    double baseline_floor = 10.0; // packet_in/s
};

struct PortOffender {
    DatapathId switch_id = 0;
    std::uint32_t in_port = 0;
    double rate = 0;
};

struct SourceOffender {
    Ipv4Addr src;
    double rate = 0;
};

struct FlowOffender {
    DatapathId switch_id = 0;
    FlowKey key;
    double rate = 0;
};

struct Anomaly {
    std::uint64_t id = 0;
    std::string kind = "PacketInFlood";
    Ipv4Addr victim;
    double rate = 0;      // packet_in/s toward the victim over the window
    double baseline = 0;  // packet_in/s before the incident
    TimeUs window_start = 0;
    TimeUs window_end = 0;
    std::vector<PortOffender> ports;     // ranked by rate
    std::vector<SourceOffender> sources; // ranked by rate
    std::vector<FlowOffender> flows;     // ranked by rate
};

// Sliding-window packet_in flood detector.
class Guard {
public:
    explicit Guard(GuardConfig cfg = {});

    // Returns false (and counts) for samples older than the current window.
    bool ingest(const TrafficSample& s);
    // Evaluates every destination at `now`; returns anomalies raised by this call.
    std::vector<Anomaly> detect(TimeUs now);
    // Offender breakdown for a victim over the window ending at now.
    Anomaly snapshot(Ipv4Addr victim, TimeUs now) const;

    double packet_in_rate(Ipv4Addr victim, TimeUs now) const;
    double baseline(Ipv4Addr victim) const;
    bool flooding(Ipv4Addr victim) const { return active_.count(victim.value) != 0; }
    // Packets per second on a port over [from, to).
    double port_packet_rate(DatapathId sw, std::uint32_t port, SampleKind kind, TimeUs from, TimeUs to) const;
    double port_byte_rate(DatapathId sw, std::uint32_t port, SampleKind kind, TimeUs from, TimeUs to) const;

    std::uint64_t stale_dropped() const { return stale_; }
    const GuardConfig& config() const { return cfg_; }

private:
    struct PortSeries {
        std::vector<std::pair<TimeUs, std::pair<std::uint64_t, std::uint64_t>>> points; // ts -> (packets, bytes)
    };

    double window_rate(std::uint32_t victim, TimeUs now) const;

    GuardConfig cfg_;
    std::deque<TrafficSample> window_; // PacketIn samples inside the window
    TimeUs latest_ = 0;
    std::map<std::uint32_t, std::uint64_t> baseline_counts_;
    std::map<std::uint32_t, TimeUs> above_since_;
    std::map<std::uint32_t, std::uint64_t> active_; // victim -> anomaly id
    std::map<std::tuple<DatapathId, std::uint32_t, int>, PortSeries> ports_;
    std::uint64_t stale_ = 0;
    std::uint64_t next_id_ = 1;
};

struct RateLimit {
    DatapathId switch_id = 0;
    std::uint32_t port = 0;
    double pps = 0;

    bool operator==(const RateLimit&) const = default;
};

struct DefenseFlow {
    DatapathId switch_id = 0;
    ofwire::FlowMod flow_mod;
};

struct Defense {
    std::vector<RateLimit> rate_limits;
    std::vector<DefenseFlow> flows;
};

constexpr std::uint16_t kDefensePriority = 1000;
constexpr std::uint16_t kDefenseIdleTimeout = 30;

// Stage 3: one RateLimit on the top offending port at limit_fraction of its rate.
// Stage 4: drop by ipv4_src on every switch that saw the source.
// Stage 5: drop on the full flow key (in_port + src + dst).
// Throws NoOffender on an empty anomaly, InvalidArgument below stage 3.
Defense synthesize_defense(const Anomaly& a, PlanStage stage, double limit_fraction = 0.05);

// Busy intervals of a single-server work queue.
class WorkLog {
public:
    // Intervals must be appended in time order without overlap.
    void add(TimeUs start, TimeUs end);
    TimeUs busy(TimeUs from, TimeUs to) const;
    std::size_t size() const { return starts_.size(); }

private:
    std::vector<TimeUs> starts_;
    std::vector<TimeUs> ends_;
    std::vector<TimeUs> prefix_; // busy time before interval i
};

// Busy fraction of the log over [from, to), in [0, 1].
double controller_load(const WorkLog& log, TimeUs from, TimeUs to);

// FIFO single server with a fixed service time per job.
class ServiceQueue {
public:
    explicit ServiceQueue(TimeUs service_time) : service_(service_time) { }
    // Returns the completion time of a job arriving at `at`.
    TimeUs arrive(TimeUs at);
    TimeUs backlog_until() const { return busy_until_; }
    const WorkLog& log() const { return log_; }
    TimeUs service_time() const { return service_; }

private:
    TimeUs service_;
    TimeUs busy_until_ = 0;
    WorkLog log_;
};

} // namespace sdnchain::guard
