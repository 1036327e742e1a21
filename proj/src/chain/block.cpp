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


#include "sdnchain/chain/block.hpp"

#include "sdnchain/core/error.hpp"

namespace sdnchain::chain {

std::string_view to_string(TxKind k)
{
    switch (k) {
    case TxKind::Register: return "register";
    case TxKind::Snapshot: return "snapshot";
    case TxKind::Intent: return "intent";
    case TxKind::Policy: return "policy";
    case TxKind::FlowTable: return "flow_table";
    }
    return "?";
}

TxKind parse_tx_kind(std::string_view s)
{
    for (auto k : {TxKind::Register, TxKind::Snapshot, TxKind::Intent, TxKind::Policy, TxKind::FlowTable})
        if (to_string(k) == s)
            return k;
    throw Error(Errc::InvalidArgument, "unknown tx kind: " + std::string(s));
}

Digest Transaction::compute_hash() const
{
    return Hasher()
        .u8(static_cast<std::uint8_t>(kind))
        .field(payload)
        .field(submitter)
        .u64(seq)
        .finish();
}

Transaction Transaction::make(TxKind kind, Bytes payload, std::string submitter, std::uint64_t seq, TimeUs ts)
{
    Transaction tx;
    tx.kind = kind;
    tx.payload = std::move(payload);
    tx.submitter = std::move(submitter);
    tx.seq = seq;
    tx.timestamp_us = ts;
    tx.tx_hash = tx.compute_hash();
    return tx;
}

Digest Block::compute_hash() const
{
    Hasher h;
    h.field(std::string_view("block")).u64(height).bytes(prev_hash);
    h.u64(header_meta.switch_count).u64(header_meta.device_info.size());
    for (const auto& d : header_meta.device_info)
        h.field(d);
    h.u64(txs.size());
    for (const auto& tx : txs)
        h.bytes(tx.tx_hash).u64(static_cast<std::uint64_t>(tx.timestamp_us));
    return h.finish();
}

bool Block::self_consistent() const
{
    for (const auto& tx : txs)
        if (tx.compute_hash() != tx.tx_hash)
            return false;
    return compute_hash() == block_hash;
}

Block make_genesis()
{
    Block g;
    g.header_meta.device_info.push_back("digest:" + std::string(kDigestName));
    g.seal();
    return g;
}

} // namespace sdnchain::chain
