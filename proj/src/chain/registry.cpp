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


#include "sdnchain/chain/registry.hpp"

#include "sdnchain/core/error.hpp"

#include <json.hpp>

#include <algorithm>

namespace sdnchain::chain {

std::string_view to_string(Role r)
{
    switch (r) {
    case Role::Controller: return "controller";
    case Role::Switch: return "switch";
    case Role::Middleware: return "middleware";
    }
    return "?";
}

Role parse_role(std::string_view s)
{
    for (auto r : {Role::Controller, Role::Switch, Role::Middleware})
        if (to_string(r) == s)
            return r;
    throw Error(Errc::InvalidArgument, "unknown role: " + std::string(s));
}

std::string_view to_string(RegStatus s)
{
    return s == RegStatus::Registered ? "registered" : "evicted";
}

Bytes encode_register_op(const RegisterOp& op)
{
    nlohmann::ordered_json j;
    j["op"] = op.op == RegisterOp::Op::Register ? "register" : "evict";
    j["element_id"] = op.element_id;
    if (op.op == RegisterOp::Op::Register) {
        j["role"] = std::string(to_string(op.role));
        j["pubinfo"] = to_hex(op.pubinfo);
    } else {
        j["reason"] = op.reason;
    }
    return to_bytes(j.dump());
}

RegisterOp decode_register_op(ByteView payload)
{
    auto j = nlohmann::json::parse(payload.begin(), payload.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("op") || !j.contains("element_id"))
        throw Error(Errc::Malformed, "register payload");
    RegisterOp op;
    op.element_id = j["element_id"].get<std::string>();
    if (j["op"] == "register") {
        op.op = RegisterOp::Op::Register;
        op.role = parse_role(j.value("role", "controller"));
        op.pubinfo = from_hex(j.value("pubinfo", ""));
    } else if (j["op"] == "evict") {
        op.op = RegisterOp::Op::Evict;
        op.reason = j.value("reason", "");
    } else {
        throw Error(Errc::Malformed, "register op");
    }
    return op;
}

void Registry::apply(const Transaction& tx, std::uint64_t height)
{
    if (tx.kind != TxKind::Register)
        return;
    RegisterOp op;
    try {
        op = decode_register_op(tx.payload);
    } catch (const Error&) {
        return; // contract ignores malformed payloads
    }
    auto it = records_.find(op.element_id);
    if (op.op == RegisterOp::Op::Register) {
        if (it != records_.end())
            return;
        RegistrationRecord rec{op.element_id, op.role, op.pubinfo, RegStatus::Registered, height, std::nullopt};
        records_.emplace(op.element_id, std::move(rec));
        order_.push_back(op.element_id);
    } else if (it != records_.end() && it->second.status == RegStatus::Registered) {
        it->second.status = RegStatus::Evicted;
        it->second.evicted_at = height;
    }
}

const RegistrationRecord* Registry::find(std::string_view element_id) const
{
    auto it = records_.find(element_id);
    return it == records_.end() ? nullptr : &it->second;
}

bool Registry::is_registered(std::string_view element_id) const
{
    auto* r = find(element_id);
    return r && r->status == RegStatus::Registered;
}

bool Registry::is_evicted(std::string_view element_id) const
{
    auto* r = find(element_id);
    return r && r->status == RegStatus::Evicted;
}

std::vector<RegistrationRecord> Registry::view() const
{
    std::vector<RegistrationRecord> out;
    out.reserve(order_.size());
    for (const auto& id : order_)
        out.push_back(records_.find(id)->second);
    return out;
}

HeaderMeta Registry::header_meta() const
{
    HeaderMeta m;
    for (const auto& [id, rec] : records_) {
        if (rec.status != RegStatus::Registered)
            continue;
        if (rec.role == Role::Switch)
            ++m.switch_count;
        m.device_info.push_back(id + "/" + std::string(to_string(rec.role)));
    }
    return m; // map order is already sorted by id
}

} // namespace sdnchain::chain
