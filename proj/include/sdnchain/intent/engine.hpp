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

#include "sdnchain/chain/service.hpp"
#include "sdnchain/core/event_log.hpp"
#include "sdnchain/intent/translate.hpp"

#include <functional>
#include <map>
#include <memory>

namespace sdnchain::intent {

// The network as the engine sees it: a view for translation plus actuation.
class Fabric {
public:
    virtual ~Fabric() = default;
    virtual View view() const = 0;
    virtual void evict(const std::string& element, const std::string& reason) = 0;
    virtual void remap(DatapathId sw, const std::string& controller) = 0;
    virtual void install_flow(DatapathId sw, const ofwire::FlowMod& fm) = 0;
    virtual void rate_limit(DatapathId sw, std::uint32_t port, double pps) = 0;
    virtual bool flow_installed(DatapathId sw, const ofwire::FlowMod& fm) const = 0;
    // Connected and not evicted.
    virtual bool element_active(const std::string& element) const = 0;
};

struct EngineConfig {
    std::string submitter = "mw-1";
    TimeUs validation_period = 5 * kSec;
    TimeUs detect_duration = kSec;
    TimeUs subwindow = kSec;
    double success_factor = 1.5;
    double baseline_floor = 1.0; // packets/s
    int chain_retries = 3;
    TimeUs retry_delay = kSec;
    // Guard sample timestamps and reported times are relative to this instant.
    TimeUs epoch = 0;
    // Defend victims that have no traffic intent with an implicit one.
    bool auto_defense = false;
};

// Intent lifecycle and the closed validation loop. Single-threaded: every
// entry point runs on the scheduler's thread.
class Engine {
public:
    Engine(Scheduler& sched, chain::ChainService& chain, Fabric& fabric, const guard::Guard& guard,
           EngineConfig cfg = {}, EventLog* events = nullptr);
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // Checks the target, records Received and schedules translation.
    // Throws UnknownTarget or InvalidArgument.
    std::string submit(Intent in);
    void on_anomaly(const guard::Anomaly& a);

    std::optional<Intent> intent(const std::string& id) const;
    std::vector<Intent> intents() const;
    // Throws NotFound for an unknown id.
    const std::vector<ValidationReport>& reports(const std::string& id) const;
    const std::vector<Policy>& policies(const std::string& id) const;
    guard::PlanStage stage(const std::string& id) const;
    std::optional<std::string> error(const std::string& id) const;
    std::uint64_t chain_failures() const { return chain_failures_; }

private:
    struct Incident;
    struct Record;

    TimeUs rel_now() const { return sched_.now() - cfg_.epoch; }
    void record_tx(chain::TxKind kind, const nlohmann::json& payload, int attempt = 0);
    void emit(EventKind kind, nlohmann::json payload);
    void set_status(Record& r, IntentStatus s, const std::string& detail = {});
    void set_stage(Record& r, guard::PlanStage s);
    void translate_now(const std::string& id);
    // Runs actions from index `from`; `done(ok)` fires once all ran or one failed.
    void run_actions(const std::string& id, std::shared_ptr<Policy> p, std::size_t from,
                     std::function<void(bool)> done);
    void provision(Record& r, Policy p, std::function<void(bool)> done);
    void schedule_validation(const std::string& id);
    void validate_static(const std::string& id);
    void start_incident(Record& r, const guard::Anomaly& a);
    void run_step(const std::string& id, std::size_t step);
    void validate_traffic(const std::string& id);
    guard::Anomaly offenders(Record& r);
    Record& get(const std::string& id);
    const Record& get(const std::string& id) const;

    Scheduler& sched_;
    chain::ChainService& chain_;
    Fabric& fabric_;
    const guard::Guard& guard_;
    EngineConfig cfg_;
    EventLog* events_;
    std::shared_ptr<bool> alive_;
    std::map<std::string, std::unique_ptr<Record>> records_;
    std::vector<std::string> order_;
    std::uint64_t next_id_ = 1;
    std::uint64_t chain_failures_ = 0;
};

// Intent with its stage, policies, reports and error. Throws NotFound.
nlohmann::json intent_document(const Engine& e, const std::string& id);

} // namespace sdnchain::intent
