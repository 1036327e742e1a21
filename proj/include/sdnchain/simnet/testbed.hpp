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
#include "sdnchain/mw/middleware.hpp"
#include "sdnchain/simnet/network.hpp"

namespace sdnchain::simnet {

struct TestbedConfig {
    TopologySpec topology = default_topology();
    chain::ClusterOptions chain;
    mw::MiddlewareConfig middleware;
    NetworkConfig network;
    ControllerConfig controller; // template; id is replaced per controller
    std::vector<std::string> controllers{"c1", "c2"};
    std::uint64_t seed = 1;
};

// Chain, middleware, controllers and network wired together on one scheduler.
class Testbed {
public:
    explicit Testbed(TestbedConfig cfg);
    ~Testbed();

    // Registers the configured controllers, starts the middleware, connects the
    // controllers and attaches every switch. Runs until every switch is mapped or
    // `limit` elapses; returns whether all switches were mapped.
    bool build(TimeUs limit = 10 * kSec);

    // Creates a controller instance wired to the middleware (not yet connected).
    std::shared_ptr<ReferenceController> add_controller(const std::string& id);
    // Submits a Register transaction for the controller (self-submitted).
    void register_controller(const std::string& id);
    mw::ConnectResult connect(const std::string& id);

    Scheduler& sched() { return sched_; }
    chain::ChainService& chain() { return *chain_; }
    mw::Middleware& mw() { return *mw_; }
    Network& net() { return *net_; }
    ControllerFabric& fabric() { return *fabric_; }
    ReferenceController& controller(const std::string& id) { return *ctrls_.at(id); }
    const std::map<std::string, std::shared_ptr<ReferenceController>>& controllers() const { return ctrls_; }
    const TestbedConfig& config() const { return cfg_; }

    std::uint64_t packet_ins() const;

private:
    TestbedConfig cfg_;
    Scheduler sched_;
    std::unique_ptr<chain::ChainService> chain_;
    std::unique_ptr<mw::Middleware> mw_;
    std::unique_ptr<Network> net_;
    std::shared_ptr<ControllerFabric> fabric_;
    std::map<std::string, std::shared_ptr<ReferenceController>> ctrls_;
};

} // namespace sdnchain::simnet
