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


#include "sdnchain/chain/ledger.hpp"

#include "sdnchain/core/error.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace sdnchain::chain {

Ledger::Ledger()
{
    blocks_.push_back(std::make_shared<const Block>(make_genesis()));
}

void Ledger::append(BlockPtr block)
{
    if (block->height != blocks_.size() || block->prev_hash != head().block_hash)
        throw Error(Errc::InvariantViolation, "block does not extend the head");
    for (std::size_t i = 0; i < block->txs.size(); ++i) {
        const auto& tx = block->txs[i];
        tx_index_.emplace(tx.tx_hash, TxLocation{block->height, i});
        auto& last = last_seq_[tx.submitter];
        last = std::max(last, tx.seq);
        registry_.apply(tx, block->height);
    }
    total_tx_ += block->txs.size();
    blocks_.push_back(std::move(block));
}

ChainHead Ledger::chain_head() const
{
    return ChainHead{height(), head().block_hash, total_tx_};
}

const Block& Ledger::block_at(std::uint64_t h) const
{
    if (h >= blocks_.size())
        throw Error(Errc::NotFound, "no block at height " + std::to_string(h));
    return *blocks_[h];
}

std::optional<TxLocation> Ledger::locate_tx(const Digest& h) const
{
    auto it = tx_index_.find(h);
    if (it == tx_index_.end())
        return std::nullopt;
    return it->second;
}

const Transaction& Ledger::tx(const Digest& h) const
{
    auto loc = locate_tx(h);
    if (!loc)
        throw Error(Errc::NotFound, "no transaction " + digest_hex(h));
    return blocks_[loc->height]->txs[loc->index];
}

std::uint64_t Ledger::last_seq(std::string_view submitter) const
{
    auto it = last_seq_.find(std::string(submitter));
    return it == last_seq_.end() ? 0 : it->second;
}

HeaderMeta expected_meta(const Registry& registry, const std::vector<Transaction>& txs, std::uint64_t height)
{
    bool touches = false;
    for (const auto& tx : txs)
        touches |= tx.kind == TxKind::Register;
    if (!touches)
        return registry.header_meta();
    Registry copy = registry;
    for (const auto& tx : txs)
        copy.apply(tx, height);
    return copy.header_meta();
}

Block build_block(const Ledger& ledger, std::vector<Transaction> txs)
{
    Block b;
    b.height = ledger.height() + 1;
    b.prev_hash = ledger.head().block_hash;
    b.header_meta = expected_meta(ledger.registry(), txs, b.height);
    b.txs = std::move(txs);
    b.seal();
    return b;
}

VerifyResult verify_chain(std::span<const Block> blocks)
{
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        if (b.height != i)
            return {false, i, "height out of sequence"};
        Digest expected_prev = i == 0 ? kZeroDigest : blocks[i - 1].block_hash;
        if (b.prev_hash != expected_prev)
            return {false, i, "prev_hash link broken"};
        for (const auto& tx : b.txs)
            if (tx.compute_hash() != tx.tx_hash)
                return {false, i, "tx hash mismatch"};
        if (b.compute_hash() != b.block_hash)
            return {false, i, "block hash mismatch"};
    }
    return {};
}

std::string export_block_line(const Block& b)
{
    nlohmann::ordered_json j;
    j["height"] = b.height;
    j["prev_hash"] = digest_hex(b.prev_hash);
    j["block_hash"] = digest_hex(b.block_hash);
    j["header_meta"] = {{"switch_count", b.header_meta.switch_count}, {"device_info", b.header_meta.device_info}};
    auto txs = nlohmann::ordered_json::array();
    for (const auto& tx : b.txs) {
        nlohmann::ordered_json t;
        t["tx_hash"] = digest_hex(tx.tx_hash);
        t["kind"] = std::string(to_string(tx.kind));
        t["submitter"] = tx.submitter;
        t["seq"] = tx.seq;
        t["timestamp_us"] = tx.timestamp_us;
        t["payload"] = to_hex(tx.payload);
        txs.push_back(std::move(t));
    }
    j["txs"] = std::move(txs);
    return j.dump();
}

void export_chain(std::ostream& out, std::span<const BlockPtr> blocks)
{
    for (const auto& b : blocks)
        out << export_block_line(*b) << '\n';
}

Block parse_block_line(std::string_view line)
{
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(Errc::Malformed, "chain export line is not a JSON object");
    try {
        Block b;
        b.height = j.at("height").get<std::uint64_t>();
        b.prev_hash = parse_digest(j.at("prev_hash").get<std::string>());
        b.block_hash = parse_digest(j.at("block_hash").get<std::string>());
        b.header_meta.switch_count = j.at("header_meta").at("switch_count").get<std::uint32_t>();
        b.header_meta.device_info = j.at("header_meta").at("device_info").get<std::vector<std::string>>();
        for (const auto& t : j.at("txs")) {
            Transaction tx;
            tx.tx_hash = parse_digest(t.at("tx_hash").get<std::string>());
            tx.kind = parse_tx_kind(t.at("kind").get<std::string>());
            tx.submitter = t.at("submitter").get<std::string>();
            tx.seq = t.at("seq").get<std::uint64_t>();
            tx.timestamp_us = t.at("timestamp_us").get<TimeUs>();
            tx.payload = from_hex(t.at("payload").get<std::string>());
            b.txs.push_back(std::move(tx));
        }
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Malformed, e.what());
    }
}

std::vector<Block> import_chain(std::istream& in)
{
    std::vector<Block> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(parse_block_line(line));
    return out;
}

} // namespace sdnchain::chain
