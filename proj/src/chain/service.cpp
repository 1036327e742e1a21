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


#include "sdnchain/chain/service.hpp"

#include "sdnchain/core/error.hpp"

namespace sdnchain::chain {

ChainService::ChainService(Scheduler& sched, ClusterOptions opts) : sched_(sched), cluster_(sched, std::move(opts))
{
    cluster_.on_commit([this](NodeId node, const BlockPtr& block, TimeUs at) {
        if (node == cluster_.reference())
            committed(block, at);
    });
}

Transaction ChainService::make_tx(TxKind kind, Bytes payload, const std::string& submitter)
{
    auto& next = next_seq_[submitter];
    next = std::max(next, ledger().last_seq(submitter)) + 1;
    return Transaction::make(kind, std::move(payload), submitter, next, sched_.now());
}

bool ChainService::is_registered(std::string_view element_id) const
{
    return ledger().registry().is_registered(element_id);
}

Digest ChainService::submit(Transaction tx, ReceiptFn on_receipt, FailureFn on_fail)
{
    if (tx.tx_hash != tx.compute_hash())
        throw Error(Errc::Malformed, "tx_hash does not match contents");
    if (tx.kind != TxKind::Register && !is_registered(tx.submitter) && !registering_.count(tx.submitter))
        throw Error(Errc::NotRegistered, "submitter not registered: " + tx.submitter);
    if (tx.kind == TxKind::Register) {
        try {
            auto op = decode_register_op(tx.payload);
            if (op.op == RegisterOp::Op::Register)
                ++registering_[op.element_id];
        } catch (const Error&) {
        }
    }
    const Digest h = tx.tx_hash;
    if (ledger().contains_tx(h) || waiting_.count(h))
        return h;
    Waiter w{std::move(on_receipt), std::move(on_fail), {}};
    w.timeout = sched_.after(view_change_budget(cluster_.options().config), [this, h] {
        auto it = waiting_.find(h);
        if (it == waiting_.end())
            return;
        auto fail = std::move(it->second.on_fail);
        waiting_.erase(it);
        if (fail)
            fail(Error(Errc::ConsensusTimeout, "no commit for " + digest_hex(h)));
    });
    waiting_.emplace(h, std::move(w));
    cluster_.submit(tx);
    return h;
}

Digest ChainService::submit(TxKind kind, Bytes payload, const std::string& submitter, ReceiptFn on_receipt,
                            FailureFn on_fail)
{
    return submit(make_tx(kind, std::move(payload), submitter), std::move(on_receipt), std::move(on_fail));
}

Digest ChainService::register_element(const std::string& element_id, Role role, const std::string& pubinfo,
                                      const std::string& submitter, ReceiptFn on_receipt)
{
    RegisterOp op{RegisterOp::Op::Register, element_id, role, to_bytes(pubinfo), {}};
    return submit(TxKind::Register, encode_register_op(op), submitter, std::move(on_receipt));
}

Digest ChainService::evict_element(const std::string& element_id, const std::string& reason,
                                   const std::string& submitter, ReceiptFn on_receipt)
{
    const auto* rec = ledger().registry().find(element_id);
    if (!rec)
        throw Error(Errc::UnknownElement, "unknown element: " + element_id);
    RegisterOp op{RegisterOp::Op::Evict, element_id, rec->role, {}, reason};
    return submit(TxKind::Register, encode_register_op(op), submitter, std::move(on_receipt));
}

void ChainService::committed(const BlockPtr& block, TimeUs at)
{
    for (const auto& tx : block->txs) {
        if (tx.kind == TxKind::Register) {
            try {
                auto op = decode_register_op(tx.payload);
                auto it = registering_.find(op.element_id);
                if (op.op == RegisterOp::Op::Register && it != registering_.end() && --it->second == 0)
                    registering_.erase(it);
            } catch (const Error&) {
            }
        }
        auto it = waiting_.find(tx.tx_hash);
        if (it == waiting_.end())
            continue;
        auto w = std::move(it->second);
        waiting_.erase(it);
        w.timeout.cancel();
        if (w.on_receipt)
            w.on_receipt(Receipt{tx.tx_hash, block->height});
    }
    for (const auto& fn : block_hooks_)
        fn(block, at);
}

} // namespace sdnchain::chain
