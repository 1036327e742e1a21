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

#include "sdnchain/chain/digest.hpp"
#include "sdnchain/core/scheduler.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace sdnchain::chain {

enum class TxKind : std::uint8_t { Register = 0, Snapshot = 1, Intent = 2, Policy = 3, FlowTable = 4 };

std::string_view to_string(TxKind k);
TxKind parse_tx_kind(std::string_view s);

struct Transaction {
    Digest tx_hash{};
    TxKind kind = TxKind::Snapshot;
    Bytes payload;
    std::string submitter;
    std::uint64_t seq = 0;
    TimeUs timestamp_us = 0;

    bool operator==(const Transaction&) const = default;

    // digest(kind | payload | submitter | seq); timestamp is not covered.
    Digest compute_hash() const;
    static Transaction make(TxKind kind, Bytes payload, std::string submitter, std::uint64_t seq, TimeUs ts);
};

struct HeaderMeta {
    std::uint32_t switch_count = 0;
    std::vector<std::string> device_info; // "<element_id>/<role>", sorted

    bool operator==(const HeaderMeta&) const = default;
};

struct Block {
    std::uint64_t height = 0;
    Digest prev_hash{};
    HeaderMeta header_meta;
    std::vector<Transaction> txs;
    Digest block_hash{};

    bool operator==(const Block&) const = default;

    Digest compute_hash() const;
    void seal() { block_hash = compute_hash(); }
    // Recomputes every tx hash and the block hash.
    bool self_consistent() const;
};

using BlockPtr = std::shared_ptr<const Block>;

Block make_genesis();

struct Receipt {
    Digest tx_hash{};
    std::uint64_t block_height = 0;
};

} // namespace sdnchain::chain
