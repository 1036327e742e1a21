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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

namespace sdnchain::gateway {

struct GatewayConfig {
    std::string host = "127.0.0.1";
    int port = 8080; // 0 picks a free port
    // The live session: topology, chain, controllers and timed events. Its
    // duration is ignored; traffic started by events runs until shutdown.
    scenario::ScenarioSpec live;
    // Virtual seconds per wall second. 0 freezes the clock; it then moves only
    // through advance().
    double speed = 1.0;
    TimeUs step = 20 * kMs; // largest virtual advance per loop turn
    std::chrono::milliseconds request_timeout{10000};
    scenario::RuntimeOptions runtime;
};

// State handed to request handlers; replaced whole at event boundaries.
struct Published {
    TimeUs now_rel = 0;
    std::uint64_t last_seq = 0;
    nlohmann::json head;
    nlohmann::json registry;
    nlohmann::json mapping;
    nlohmann::json topology;
    std::vector<std::string> intent_order;
    std::map<std::string, nlohmann::json> intents;
};

// HTTP service over a live simulated network. One thread owns the runtime;
// handlers read published snapshots and send writes to it as messages.
class Gateway {
public:
    using Command = std::function<nlohmann::json(scenario::Runtime&)>;

    explicit Gateway(GatewayConfig cfg);
    ~Gateway();
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    // Builds the live session, starts the simulation thread and binds.
    // Throws BindFailure or InvariantViolation (build stalled).
    void start();
    // Stops listening, ends open streams and joins the threads. Idempotent.
    void stop();
    // Blocks until stop() is called from elsewhere.
    void wait();
    int port() const { return port_; }
    std::string base_url() const;

    // Runs `cmd` on the simulation thread and returns its result; rethrows its Error.
    nlohmann::json call(Command cmd);
    // Advances virtual time by `span` on the simulation thread.
    void advance(TimeUs span);

    std::shared_ptr<const Published> published() const;
    // Chain reads from immutable committed blocks. Throw NotFound.
    chain::BlockPtr block(std::uint64_t height) const;
    std::pair<chain::BlockPtr, std::size_t> find_tx(const chain::Digest& hash) const;
    std::uint64_t height() const;
    const EventLog& events() const;

    // Same as the HTTP endpoints, for the CLI and tests.
    nlohmann::json submit_intent(const nlohmann::json& body);
    nlohmann::json remap(const nlohmann::json& body);
    nlohmann::json evict(const std::string& element_id, const nlohmann::json& body);
    static nlohmann::json run_scenario_request(const nlohmann::json& body);

private:
    struct Http;
    struct Job {
        Command cmd;
        std::promise<nlohmann::json> done;
    };

    void sim_loop();
    void drain();
    void publish();
    void sync_chain();
    void routes();

    GatewayConfig cfg_;
    std::unique_ptr<scenario::Runtime> rt_;
    std::unique_ptr<Http> http_;
    int port_ = 0;

    std::thread sim_thread_;
    std::thread http_thread_;
    std::mutex jobs_mu_;
    std::condition_variable jobs_cv_;
    std::deque<std::shared_ptr<Job>> jobs_;
    std::atomic<bool> stopping_{false};
    bool started_ = false;

    mutable std::mutex pub_mu_;
    std::shared_ptr<const Published> pub_;

    mutable std::shared_mutex chain_mu_;
    std::vector<chain::BlockPtr> blocks_;
    std::unordered_map<chain::Digest, std::pair<std::uint64_t, std::size_t>, chain::DigestHash> tx_index_;

    mutable std::mutex ev_mu_;
    std::condition_variable ev_cv_;
    std::uint64_t ev_seq_ = 0;

    std::mutex run_mu_;
};

} // namespace sdnchain::gateway
