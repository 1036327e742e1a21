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

#include "sdnchain/intent/engine.hpp"
#include "sdnchain/simnet/testbed.hpp"

namespace sdnchain::scenario {

// Engine actuation on a simulated testbed: OpenFlow changes go through the
// middleware, port policers are set on the switch directly.
class TestbedFabric : public intent::Fabric {
public:
    explicit TestbedFabric(simnet::Testbed& tb) : tb_(tb) { }

    intent::View view() const override;
    void evict(const std::string& element, const std::string& reason) override;
    void remap(DatapathId sw, const std::string& controller) override;
    void install_flow(DatapathId sw, const ofwire::FlowMod& fm) override;
    void rate_limit(DatapathId sw, std::uint32_t port, double pps) override;
    bool flow_installed(DatapathId sw, const ofwire::FlowMod& fm) const override;
    bool element_active(const std::string& element) const override;

private:
    simnet::Testbed& tb_;
};

} // namespace sdnchain::scenario
