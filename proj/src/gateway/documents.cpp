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


#include "sdnchain/gateway/documents.hpp"

#include "sdnchain/chain/registry.hpp"
#include "sdnchain/mw/middleware.hpp"
#include "sdnchain/ofwire/codec.hpp"
#include "sdnchain/ofwire/describe.hpp"

namespace sdnchain::gateway {

nlohmann::json head_document(const chain::ChainHead& head, std::uint32_t consensus_nodes,
                             std::size_t latest_block_txs)
{
    return {{"height", head.height},
            {"block_hash", chain::digest_hex(head.block_hash)},
            {"total_tx", head.total_tx_count},
            {"consensus_nodes", consensus_nodes},
            {"latest_block_txs", latest_block_txs}};
}

nlohmann::json block_document(const chain::Block& b)
{
    auto txs = nlohmann::json::array();
    for (const auto& tx : b.txs)
        txs.push_back({{"tx_hash", chain::digest_hex(tx.tx_hash)},
                       {"kind", chain::to_string(tx.kind)},
                       {"submitter", tx.submitter},
                       {"seq", tx.seq},
                       {"timestamp_us", tx.timestamp_us},
                       {"payload_len", tx.payload.size()}});
    return {{"height", b.height},
            {"block_hash", chain::digest_hex(b.block_hash)},
            {"prev_hash", chain::digest_hex(b.prev_hash)},
            {"header_meta", {{"switch_count", b.header_meta.switch_count}, {"device_info", b.header_meta.device_info}}},
            {"tx_count", b.txs.size()},
            {"txs", txs}};
}

nlohmann::json decode_payload(const chain::Transaction& tx)
{
    try {
        switch (tx.kind) {
        case chain::TxKind::Snapshot: {
            auto rec = mw::decode_snapshot(tx.payload);
            nlohmann::json j = {{"direction", mw::to_string(rec.direction)},
                                {"switch_id", mw::switch_element_id(rec.switch_id)},
                                {"controller_id", rec.controller_id},
                                {"timestamp_us", rec.timestamp_us},
                                {"tag", rec.tag},
                                {"message_hex", to_hex(rec.bytes)}};
            auto [msg, rest] = ofwire::decode(rec.bytes);
            j["message"] = ofwire::describe(msg);
            return j;
        }
        case chain::TxKind::Register: {
            auto op = chain::decode_register_op(tx.payload);
            nlohmann::json j = {{"op", op.op == chain::RegisterOp::Op::Register ? "Register" : "Evict"},
                                {"element_id", op.element_id},
                                {"role", chain::to_string(op.role)},
                                {"pubinfo", to_string(op.pubinfo)}};
            if (!op.reason.empty())
                j["reason"] = op.reason;
            return j;
        }
        default: {
            auto j = nlohmann::json::parse(to_string(tx.payload), nullptr, false);
            return j.is_discarded() ? nlohmann::json() : j;
        }
        }
    } catch (const Error&) {
        return nullptr;
    }
}

nlohmann::json tx_document(const chain::Transaction& tx, std::uint64_t height)
{
    return {{"tx_hash", chain::digest_hex(tx.tx_hash)},
            {"block_height", height},
            {"kind", chain::to_string(tx.kind)},
            {"submitter", tx.submitter},
            {"seq", tx.seq},
            {"timestamp_us", tx.timestamp_us},
            {"payload_hex", to_hex(tx.payload)},
            {"decoded", decode_payload(tx)}};
}

nlohmann::json registry_document(const std::vector<chain::RegistrationRecord>& records)
{
    auto out = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json j = {{"element_id", r.element_id},
                            {"role", chain::to_string(r.role)},
                            {"status", chain::to_string(r.status)},
                            {"registered_at", r.registered_at},
                            {"pubinfo", to_string(r.pubinfo)}};
        j["evicted_at"] = r.evicted_at ? nlohmann::json(*r.evicted_at) : nlohmann::json();
        out.push_back(std::move(j));
    }
    return {{"elements", out}};
}

nlohmann::json mapping_document(const std::map<DatapathId, std::string>& mapping,
                                const std::vector<std::string>& controllers,
                                const std::vector<DatapathId>& pending)
{
    auto edges = nlohmann::json::array();
    for (const auto& [dpid, ctrl] : mapping)
        edges.push_back({{"switch_id", mw::switch_element_id(dpid)}, {"controller_id", ctrl}});
    auto waiting = nlohmann::json::array();
    for (auto dpid : pending)
        waiting.push_back(mw::switch_element_id(dpid));
    return {{"mapping", edges}, {"controllers", controllers}, {"pending", waiting}};
}

nlohmann::json topology_document(const simnet::Topology& topo, const std::map<DatapathId, std::string>& mapping)
{
    auto switches = nlohmann::json::array();
    for (std::size_t i = 0; i < topo.switch_count(); ++i) {
        auto it = mapping.find(topo.dpid(i));
        switches.push_back({{"name", topo.switch_name(i)},
                            {"dpid", topo.dpid(i)},
                            {"element_id", mw::switch_element_id(topo.dpid(i))},
                            {"controller_id", it == mapping.end() ? nlohmann::json() : nlohmann::json(it->second)}});
    }
    auto links = nlohmann::json::array();
    for (const auto& l : topo.spec().links)
        links.push_back({{"id", l.a + "-" + l.b}, {"a", l.a}, {"b", l.b}, {"capacity_mbps", l.capacity_mbps}});
    auto hosts = nlohmann::json::array();
    for (std::size_t h = 0; h < topo.host_count(); ++h) {
        const auto& hs = topo.host(h);
        hosts.push_back({{"name", hs.name},
                         {"mac", hs.mac.str()},
                         {"ip", hs.ip.str()},
                         {"switch", hs.attached_to},
                         {"port", topo.host_port(h)}});
    }
    return {{"name", topo.spec().name}, {"switches", switches}, {"links", links}, {"hosts", hosts}};
}

int http_status(Errc code)
{
    switch (code) {
    case Errc::NotFound:
    case Errc::UnknownElement:
    case Errc::UnknownTarget:
    case Errc::UnknownVictim:
        return 404;
    case Errc::InvalidArgument:
    case Errc::Malformed:
        return 400;
    case Errc::NotRegistered:
    case Errc::Evicted:
        return 409;
    case Errc::SeqTooOld:
        return 410;
    case Errc::NoFeasiblePolicy:
        return 422;
    case Errc::ChainUnavailable:
    case Errc::ConsensusTimeout:
        return 503;
    default:
        return 500;
    }
}

nlohmann::json error_document(const Error& e)
{
    return {{"error", to_string(e.code())}, {"message", e.what()}};
}

} // namespace sdnchain::gateway
