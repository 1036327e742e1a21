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

#include "sdnchain/chain/cluster.hpp"
#include "sdnchain/core/error.hpp"

#include <unordered_map>

namespace sdnchain::chain {

// Client-side facade over a replicated cluster: validates and submits
// transactions, delivers receipts and answers queries from one honest replica.
class ChainService {
public:
    using ReceiptFn = std::function<void(const Receipt&)>;
    using FailureFn = std::function<void(const Error&)>;
    using BlockFn = std::function<void(const BlockPtr&, TimeUs)>;

    ChainService(Scheduler& sched, ClusterOptions opts);

    // Builds a transaction with the submitter's next sequence number.
    Transaction make_tx(TxKind kind, Bytes payload, const std::string& submitter);

    // Throws NotRegistered unless the submitter is registered (or has a Register
    // in flight); Register transactions bootstrap. The receipt arrives once the
    // reference replica commits; on_fail gets ConsensusTimeout after the budget.
    Digest submit(Transaction tx, ReceiptFn on_receipt = {}, FailureFn on_fail = {});
    Digest submit(TxKind kind, Bytes payload, const std::string& submitter, ReceiptFn on_receipt = {},
                  FailureFn on_fail = {});

    // Register/evict helpers for the registration contract.
    Digest register_element(const std::string& element_id, Role role, const std::string& pubinfo,
                            const std::string& submitter, ReceiptFn on_receipt = {});
    Digest evict_element(const std::string& element_id, const std::string& reason, const std::string& submitter,
                         ReceiptFn on_receipt = {});

    void on_block(BlockFn fn) { block_hooks_.push_back(std::move(fn)); }

    const Ledger& ledger() const { return cluster_.replica(cluster_.reference()).ledger(); }
    ChainHead head() const { return ledger().chain_head(); }
    const Block& block(std::uint64_t height) const { return ledger().block_at(height); }
    const Transaction& tx(const Digest& hash) const { return ledger().tx(hash); }
    std::vector<RegistrationRecord> registry_view() const { return ledger().registry().view(); }
    bool is_registered(std::string_view element_id) const;
    std::size_t in_flight() const { return waiting_.size(); }

    const Cluster& cluster() const { return cluster_; }
    std::uint32_t node_count() const { return cluster_.options().config.n_nodes; }

private:
    struct Waiter {
        ReceiptFn on_receipt;
        FailureFn on_fail;
        TimerHandle timeout;
    };

    void committed(const BlockPtr& block, TimeUs at);

    Scheduler& sched_;
    Cluster cluster_;
    std::unordered_map<std::string, std::uint64_t> next_seq_;
    std::unordered_map<Digest, Waiter, DigestHash> waiting_;
    std::unordered_map<std::string, std::uint32_t> registering_;
    std::vector<BlockFn> block_hooks_;
};

} // namespace sdnchain::chain
