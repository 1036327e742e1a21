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


#include "sdnchain/simnet/testbed.hpp"

namespace sdnchain::simnet {

Testbed::Testbed(TestbedConfig cfg) : cfg_(std::move(cfg))
{
    chain_ = std::make_unique<chain::ChainService>(sched_, cfg_.chain);
    mw_ = std::make_unique<mw::Middleware>(sched_, *chain_, cfg_.middleware);
    net_ = std::make_unique<Network>(sched_, Topology(cfg_.topology), cfg_.network, cfg_.seed);
    fabric_ = std::make_shared<ControllerFabric>(net_->topology());
    for (const auto& id : cfg_.controllers)
        add_controller(id);
}

Testbed::~Testbed()
{
    // Controllers and switches hold pipes into the middleware; tear down the
    // data side first.
    ctrls_.clear();
    net_.reset();
    mw_.reset();
}

std::shared_ptr<ReferenceController> Testbed::add_controller(const std::string& id)
{
    auto cc = cfg_.controller;
    cc.id = id;
    auto c = std::make_shared<ReferenceController>(sched_, fabric_, cc);
    mw::Middleware* m = mw_.get();
    c->set_upstream([m](mw::ConnId ch, ByteView b) { m->controller_bytes(ch, b); },
                    [m](mw::ConnId ch) { m->controller_channel_closed(ch); });
    ctrls_[id] = c;
    return c;
}

void Testbed::register_controller(const std::string& id)
{
    chain_->register_element(id, chain::Role::Controller, "controller:" + id, id);
}

mw::ConnectResult Testbed::connect(const std::string& id)
{
    return mw_->controller_connect(id, ctrls_.at(id));
}

bool Testbed::build(TimeUs limit)
{
    for (const auto& id : cfg_.controllers)
        register_controller(id);
    mw_->start();
    const TimeUs deadline = sched_.now() + limit;
    auto registered = [&] {
        if (!chain_->is_registered(cfg_.middleware.id))
            return false;
        for (const auto& id : cfg_.controllers)
            if (!chain_->is_registered(id))
                return false;
        return true;
    };
    while (!registered() && sched_.now() < deadline)
        sched_.run_for(10 * kMs);
    for (const auto& id : cfg_.controllers)
        connect(id);
    net_->attach(*mw_);
    auto mapped = [&] {
        if (cfg_.controllers.empty())
            return true;
        if (mw_->mapping().size() != net_->switch_count())
            return false;
        return mw_->pending_switches().empty();
    };
    while (!mapped() && sched_.now() < deadline)
        sched_.run_for(10 * kMs);
    return mapped();
}

std::uint64_t Testbed::packet_ins() const
{
    std::uint64_t n = 0;
    for (const auto& [id, c] : ctrls_)
        n += c->packet_ins();
    return n;
}

} // namespace sdnchain::simnet
