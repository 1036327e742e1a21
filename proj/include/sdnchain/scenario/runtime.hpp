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

#include "sdnchain/core/event_log.hpp"
#include "sdnchain/guard/guard.hpp"
#include "sdnchain/intent/engine.hpp"
#include "sdnchain/scenario/fabric.hpp"
#include "sdnchain/scenario/spec.hpp"

#include <limits>
#include <random>

namespace sdnchain::scenario {

struct MetricsPoint {
    double t_s = 0;
    double packet_in_rate = 0;  // summed over controllers, messages/s
    double controller_load = 0; // busiest controller, [0, 1]
    std::map<std::string, double> controller_rates;
    std::map<std::string, double> controller_loads;
    std::vector<std::pair<std::string, double>> link_rates; // bytes/s in topology link order
};

struct Annotation {
    double t_s = 0;
    std::string kind;
    nlohmann::json detail;
};

struct MetricsTrace {
    std::vector<MetricsPoint> points;
    std::vector<Annotation> annotations;

    // t_s,packet_in_rate,controller_load,link_id,byte_rate with one row per link per point.
    std::string csv() const;
    // Byte rate series of one link.
    std::vector<std::pair<double, double>> link_series(const std::string& link_id) const;
};

struct RuntimeOptions {
    TimeUs guard_tick = 100 * kMs;
    TimeUs metrics_interval = 500 * kMs;
    guard::GuardConfig guard;
    intent::EngineConfig engine;
    std::size_t event_capacity = 10000;
};

// A testbed with the guard, intent engine, event stream and metrics attached.
// Relative time 0 is the moment every switch is mapped.
class Runtime {
public:
    Runtime(const ScenarioSpec& spec, RuntimeOptions opts = {});
    ~Runtime();
    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;

    // Builds the testbed and starts the periodic tasks. False if the build stalls.
    bool start();
    TimeUs now_rel() const { return sched().now() - epoch_; }
    void run_until_rel(TimeUs t) { tb_->sched().run_until(epoch_ + t); }
    TimeUs epoch() const { return epoch_; }

    void start_traffic(const StartTraffic& t);
    void start_ddos(const StartDdos& d);
    void stop_attack();
    std::string submit_intent(const intent::Intent& in);
    // Queues timed events on the scheduler relative to the epoch (live sessions).
    // Failures are reported as ScenarioEvent "error" entries.
    void schedule(const std::vector<TimedEvent>& events);
    // Host index by name or address. Throws UnknownTarget.
    std::size_t host(const std::string& name) const;

    Scheduler& sched() const { return tb_->sched(); }
    simnet::Testbed& testbed() { return *tb_; }
    const simnet::Testbed& testbed() const { return *tb_; }
    guard::Guard& guard() { return guard_; }
    intent::Engine& engine() { return *engine_; }
    const intent::Engine& engine() const { return *engine_; }
    EventLog& events() { return events_; }
    const MetricsTrace& trace() const { return trace_; }
    const ScenarioSpec& spec() const { return spec_; }
    std::set<std::size_t> background_hosts() const { return background_; }
    const std::vector<simnet::AttackPlan>& attacks() const { return attacks_; }

private:
    void guard_tick();
    void metrics_tick();
    void scenario_event(const std::string& what, nlohmann::json detail);

    ScenarioSpec spec_;
    RuntimeOptions opts_;
    std::unique_ptr<simnet::Testbed> tb_;
    guard::Guard guard_;
    EventLog events_;
    std::unique_ptr<TestbedFabric> fabric_;
    std::unique_ptr<intent::Engine> engine_;
    MetricsTrace trace_;
    TimeUs epoch_ = std::numeric_limits<TimeUs>::max() / 2; // set when the build completes
    std::mt19937_64 rng_;
    std::set<std::size_t> background_;
    std::vector<simnet::AttackPlan> attacks_;
    std::map<std::string, std::uint64_t> last_pins_;
    std::map<std::string, std::uint64_t> last_link_bytes_;
    std::shared_ptr<bool> alive_;
};

} // namespace sdnchain::scenario
