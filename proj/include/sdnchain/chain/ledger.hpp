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

#include "sdnchain/chain/registry.hpp"

#include <iosfwd>
#include <span>
#include <unordered_map>

namespace sdnchain::chain {

struct ChainHead {
    std::uint64_t height = 0;
    Digest block_hash{};
    std::uint64_t total_tx_count = 0;
};

struct TxLocation {
    std::uint64_t height = 0;
    std::size_t index = 0;
};

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept
    {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i)
            h = h << 8 | d[i];
        return h;
    }
};

// One replica's committed chain plus the contract state derived from it.
class Ledger {
public:
    Ledger();

    // Throws Error(InvariantViolation) if the block does not extend the head.
    void append(BlockPtr block);

    const std::vector<BlockPtr>& blocks() const { return blocks_; }
    const Block& head() const { return *blocks_.back(); }
    std::uint64_t height() const { return blocks_.size() - 1; }
    ChainHead chain_head() const;
    std::uint64_t total_tx() const { return total_tx_; }

    const Block& block_at(std::uint64_t height) const; // throws NotFound
    bool contains_tx(const Digest& h) const { return tx_index_.count(h) != 0; }
    std::optional<TxLocation> locate_tx(const Digest& h) const;
    const Transaction& tx(const Digest& h) const; // throws NotFound
    const Registry& registry() const { return registry_; }
    // Highest committed seq per submitter, 0 if none.
    std::uint64_t last_seq(std::string_view submitter) const;

private:
    std::vector<BlockPtr> blocks_;
    std::unordered_map<Digest, TxLocation, DigestHash> tx_index_;
    std::unordered_map<std::string, std::uint64_t> last_seq_;
    Registry registry_;
    std::uint64_t total_tx_ = 0;
};

// Builds and seals the next block on top of the ledger's head.
Block build_block(const Ledger& ledger, std::vector<Transaction> txs);
// Header meta the contracts yield after applying txs on top of the registry.
HeaderMeta expected_meta(const Registry& registry, const std::vector<Transaction>& txs, std::uint64_t height);

struct VerifyResult {
    bool ok = true;
    std::uint64_t bad_height = 0;
    std::string reason;
};

// Serial reference check of every tx hash, block hash and prev_hash link.
VerifyResult verify_chain(std::span<const Block> blocks);

// Newline-delimited export, one block per line.
void export_chain(std::ostream& out, std::span<const BlockPtr> blocks);
std::string export_block_line(const Block& b);
Block parse_block_line(std::string_view line);
std::vector<Block> import_chain(std::istream& in);

} // namespace sdnchain::chain
