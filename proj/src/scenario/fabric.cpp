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


#include "sdnchain/scenario/fabric.hpp"

#include "sdnchain/core/error.hpp"

#include <algorithm>

namespace sdnchain::scenario {

intent::View TestbedFabric::view() const
{
    intent::View v;
    v.topology = &tb_.net().topology();
    v.mapping = tb_.mw().mapping();
    v.controllers = tb_.mw().controllers();
    const auto& reg = tb_.chain().ledger().registry();
    for (std::size_t i = 0; i < v.topology->switch_count(); ++i) {
        auto dpid = v.topology->dpid(i);
        if (reg.is_evicted(mw::switch_element_id(dpid)))
            v.removed.insert(dpid);
    }
    return v;
}

void TestbedFabric::evict(const std::string& element, const std::string& reason)
{
    tb_.mw().evict(element, reason);
}

void TestbedFabric::remap(DatapathId sw, const std::string& controller)
{
    tb_.mw().remap(sw, controller);
}

void TestbedFabric::install_flow(DatapathId sw, const ofwire::FlowMod& fm)
{
    tb_.mw().install(sw, ofwire::make(0, fm));
}

void TestbedFabric::rate_limit(DatapathId sw, std::uint32_t port, double pps)
{
    auto* s = tb_.net().by_dpid(sw);
    if (!s)
        throw Error(Errc::UnknownElement, "no switch " + mw::switch_element_id(sw));
    if (tb_.chain().ledger().registry().is_evicted(mw::switch_element_id(sw)))
        throw Error(Errc::Evicted, mw::switch_element_id(sw) + " is evicted");
    if (pps > 0)
        s->set_rate_limit(port, pps);
    else
        s->clear_rate_limit(port);
}

bool TestbedFabric::flow_installed(DatapathId sw, const ofwire::FlowMod& fm) const
{
    const auto* s = tb_.net().by_dpid(sw);
    if (!s)
        return false;
    for (const auto& e : s->table().entries())
        if (e.match == fm.match && e.priority == fm.priority && e.actions == fm.actions)
            return true;
    return false;
}

bool TestbedFabric::element_active(const std::string& element) const
{
    if (tb_.chain().ledger().registry().is_evicted(element))
        return false;
    if (auto dpid = mw::parse_switch_element_id(element)) {
        auto sw = tb_.mw().connected_switches();
        return std::find(sw.begin(), sw.end(), *dpid) != sw.end();
    }
    auto cs = tb_.mw().controllers();
    return std::find(cs.begin(), cs.end(), element) != cs.end();
}

} // namespace sdnchain::scenario
