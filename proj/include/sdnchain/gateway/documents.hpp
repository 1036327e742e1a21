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

#include "sdnchain/chain/ledger.hpp"
#include "sdnchain/core/error.hpp"
#include "sdnchain/simnet/topology.hpp"

#include <json.hpp>

#include <map>

namespace sdnchain::gateway {

constexpr int kApiVersion = 1;

nlohmann::json head_document(const chain::ChainHead& head, std::uint32_t consensus_nodes,
                             std::size_t latest_block_txs);
// Block header plus a one-line summary per transaction.
nlohmann::json block_document(const chain::Block& b);
// Full transaction: raw payload hex and the decoded form.
nlohmann::json tx_document(const chain::Transaction& tx, std::uint64_t height);
// Snapshot payloads decode to the OpenFlow message, Register payloads to the
// contract op, engine records to their JSON body. Undecodable payloads give null.
nlohmann::json decode_payload(const chain::Transaction& tx);
nlohmann::json registry_document(const std::vector<chain::RegistrationRecord>& records);
nlohmann::json mapping_document(const std::map<DatapathId, std::string>& mapping,
                                const std::vector<std::string>& controllers,
                                const std::vector<DatapathId>& pending);
nlohmann::json topology_document(const simnet::Topology& topo, const std::map<DatapathId, std::string>& mapping);

int http_status(Errc code);
nlohmann::json error_document(const Error& e);

} // namespace sdnchain::gateway
