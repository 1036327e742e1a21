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


#include "sdnchain/chain/consensus.hpp"

#include "sdnchain/core/error.hpp"

#include <algorithm>

namespace sdnchain::chain {

std::string_view to_string(Algorithm a)
{
    return a == Algorithm::Pbft ? "pbft" : "rpbft";
}

Algorithm parse_algorithm(std::string_view s)
{
    if (s == "pbft" || s == "PBFT")
        return Algorithm::Pbft;
    if (s == "rpbft" || s == "RPBFT")
        return Algorithm::Rpbft;
    throw Error(Errc::InvalidArgument, "unknown algorithm: " + std::string(s));
}

std::uint32_t ConsensusConfig::committee_size() const
{
    if (algorithm == Algorithm::Pbft)
        return n_nodes;
    if (rpbft_committee_size != 0)
        return rpbft_committee_size;
    std::uint32_t c = (6 * n_nodes + 9) / 10;
    return std::min(n_nodes, std::max<std::uint32_t>(4, c));
}

void ConsensusConfig::validate() const
{
    if (n_nodes < 4)
        throw Error(Errc::InvalidArgument, "need at least 4 consensus nodes");
    if ((n_nodes - 1) % 3 != 0)
        throw Error(Errc::InvalidArgument, "node count must be 3f+1");
    if (committee_size() < 4 || committee_size() > n_nodes)
        throw Error(Errc::InvalidArgument, "committee size out of range");
    if (batch_size == 0)
        throw Error(Errc::InvalidArgument, "batch size must be positive");
    if (link_delay < 0 || batch_timeout < 0)
        throw Error(Errc::InvalidArgument, "negative delay");
}

std::uint32_t quorum_size(std::uint32_t members)
{
    std::uint32_t f = (members - 1) / 3;
    return (members + f) / 2 + 1;
}

std::string_view msg_name(const ConsensusMsg& m)
{
    static constexpr std::string_view names[] = {"request", "pre-prepare", "prepare",     "commit",
                                                 "view-change", "decide",  "fetch-block", "block-data"};
    return names[m.index()];
}

Replica::Replica(NodeId id, ConsensusConfig cfg, Behavior behavior, std::vector<NodeId> equivocation_group)
    : id_(id), cfg_(cfg), behavior_(behavior), equivocation_group_(equivocation_group.begin(), equivocation_group.end())
{
    cfg_.validate();
    if (id_ >= cfg_.n_nodes)
        throw Error(Errc::InvalidArgument, "replica id out of range");
}

std::vector<NodeId> Replica::committee(std::uint64_t height) const
{
    std::vector<NodeId> out;
    std::uint32_t c = cfg_.committee_size();
    out.reserve(c);
    if (cfg_.algorithm == Algorithm::Pbft) {
        for (NodeId i = 0; i < cfg_.n_nodes; ++i)
            out.push_back(i);
        return out;
    }
    for (std::uint32_t i = 0; i < c; ++i)
        out.push_back(static_cast<NodeId>((height + i) % cfg_.n_nodes));
    return out;
}

bool Replica::is_member(std::uint64_t height) const
{
    if (cfg_.algorithm == Algorithm::Pbft)
        return true;
    std::uint64_t off = (id_ + cfg_.n_nodes - height % cfg_.n_nodes) % cfg_.n_nodes;
    return off < cfg_.committee_size();
}

NodeId Replica::primary_for(std::uint64_t view, std::uint64_t height) const
{
    if (cfg_.algorithm == Algorithm::Pbft)
        return static_cast<NodeId>(view % cfg_.n_nodes);
    return static_cast<NodeId>((height + view % cfg_.committee_size()) % cfg_.n_nodes);
}

std::uint32_t Replica::quorum(std::uint64_t) const
{
    return quorum_size(cfg_.committee_size());
}

std::vector<NodeId> Replica::others(const std::vector<NodeId>& group) const
{
    std::vector<NodeId> out;
    out.reserve(group.size());
    for (auto n : group)
        if (n != id_)
            out.push_back(n);
    return out;
}

std::optional<TimeUs> Replica::next_deadline() const
{
    std::optional<TimeUs> d = batch_deadline_;
    auto take = [&](TimeUs t) {
        if (!d || t < *d)
            d = t;
    };
    TimeUs timeout = cfg_.view_change_timeout();
    if (vc_target_ != 0) {
        take(vc_started_at_ + timeout);
    } else if (!pending_.empty() && is_member(next_height())) {
        TimeUs oldest = std::max(pending_since_.at(pending_.front().tx_hash), view_entered_at_);
        take(oldest + timeout);
    }
    return d;
}

std::vector<Outbound> Replica::on_timer(TimeUs now)
{
    Out out;
    if (batch_deadline_ && *batch_deadline_ <= now) {
        batch_deadline_.reset();
        try_propose(now, out);
    }
    auto d = next_deadline();
    if (d && *d <= now && (vc_target_ != 0 || !pending_.empty()))
        start_view_change(std::max(view_, vc_target_) + 1, now, out);
    return out;
}

std::vector<Outbound> Replica::handle(NodeId from, const ConsensusMsg& m, TimeUs now)
{
    Out out;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, msg::Request>)
                on_request(v, now, out);
            else if constexpr (std::is_same_v<T, msg::PrePrepare>)
                on_preprepare(from, v, now, out);
            else if constexpr (std::is_same_v<T, msg::Prepare>)
                on_vote(from, v.view, v.height, v.digest, false, m, now, out);
            else if constexpr (std::is_same_v<T, msg::Commit>)
                on_vote(from, v.view, v.height, v.digest, true, m, now, out);
            else if constexpr (std::is_same_v<T, msg::ViewChange>)
                on_view_change(from, v, now, out);
            else if constexpr (std::is_same_v<T, msg::Decide>)
                on_decide(from, v, now, out);
            else if constexpr (std::is_same_v<T, msg::FetchBlock>)
                on_fetch(from, v, out);
            else
                on_block_data(from, v, now, out);
        },
        m);
    return out;
}

void Replica::on_request(const msg::Request& m, TimeUs now, Out& out)
{
    const auto& tx = m.tx;
    if (tx.tx_hash != tx.compute_hash() || ledger_.contains_tx(tx.tx_hash) || pending_since_.count(tx.tx_hash))
        return;
    pending_.push_back(tx);
    pending_since_.emplace(tx.tx_hash, now);
    try_propose(now, out);
}

int Replica::classify(std::uint64_t view, std::uint64_t height) const
{
    if (height < next_height() || view < view_)
        return -1;
    if (height > next_height() || view > view_ || (vc_target_ != 0 && view >= vc_target_))
        return 1;
    if (vc_target_ != 0)
        return -1; // leaving this view
    return 0;
}

bool Replica::valid_proposal(const Block& b) const
{
    if (b.height != next_height() || b.prev_hash != ledger_.head().block_hash || !b.self_consistent())
        return false;
    std::unordered_set<Digest, DigestHash> seen;
    for (const auto& tx : b.txs)
        if (ledger_.contains_tx(tx.tx_hash) || !seen.insert(tx.tx_hash).second)
            return false;
    return b.header_meta == expected_meta(ledger_.registry(), b.txs, b.height);
}

void Replica::on_preprepare(NodeId from, const msg::PrePrepare& m, TimeUs now, Out& out)
{
    if (!m.block)
        return reject(0);
    std::uint64_t h = m.block->height;
    int c = classify(m.view, h);
    if (c > 0) {
        buffered_.emplace_back(from, m);
        return;
    }
    if (c < 0 || !is_member(h) || from != primary_for(m.view, h))
        return reject(h);
    const Digest& d = m.block->block_hash;
    if (accepted_) {
        if (*accepted_ != d)
            reject(h);
        return;
    }
    if (!valid_proposal(*m.block))
        return reject(h);
    accepted_ = d;
    blocks_[d] = m.block;
    prepares_[d].insert(id_);
    out.push_back({others(committee(h)), msg::Prepare{view_, h, d}});
    check_prepared(now, out);
    check_committed(now, out);
}

void Replica::on_vote(NodeId from, std::uint64_t view, std::uint64_t height, const Digest& d, bool commit,
                      const ConsensusMsg& raw, TimeUs now, Out& out)
{
    int c = classify(view, height);
    if (c > 0) {
        buffered_.emplace_back(from, raw);
        return;
    }
    if (c < 0)
        return;
    auto members = committee(height);
    if (std::find(members.begin(), members.end(), from) == members.end() || !is_member(height))
        return reject(height);
    (commit ? commits_ : prepares_)[d].insert(from);
    if (commit)
        check_committed(now, out);
    else
        check_prepared(now, out);
}

void Replica::check_prepared(TimeUs now, Out& out)
{
    if (!accepted_ || sent_commit_)
        return;
    const Digest d = *accepted_;
    std::size_t votes = prepares_[d].size();
    if (votes < quorum(next_height()))
        return;
    sent_commit_ = true;
    ++stats_.commits_sent;
    stats_.min_prepares_at_commit = std::min(stats_.min_prepares_at_commit, votes);
    prepared_ = PreparedCert{view_, blocks_.at(d)};
    commits_[d].insert(id_);
    out.push_back({others(committee(next_height())), msg::Commit{view_, next_height(), d}});
    check_committed(now, out);
}

void Replica::check_committed(TimeUs now, Out& out)
{
    std::uint32_t q = quorum(next_height());
    for (const auto& [d, voters] : commits_) {
        if (voters.size() < q)
            continue;
        if (!quorum_reported_ && proposed_ && accepted_ == d) {
            quorum_reported_ = true;
            events_.push_back({ReplicaEvent::Kind::PrimaryQuorum, next_height(), view_, d});
        }
        auto it = blocks_.find(d);
        if (it != blocks_.end() && valid_proposal(*it->second)) {
            commit_block(it->second, now, out);
            return;
        }
        if (fetch_requested_.insert(d).second) {
            ++stats_.fetches;
            std::vector<NodeId> from;
            for (auto v : voters)
                if (v != id_)
                    from.push_back(v);
            out.push_back({from, msg::FetchBlock{next_height(), d}});
        }
    }
}

void Replica::commit_block(const BlockPtr& b, TimeUs now, Out& out)
{
    ledger_.append(b);
    events_.push_back({ReplicaEvent::Kind::Committed, b->height, view_, b->block_hash});
    // The request timer only restarts when one of our own requests made progress,
    // so a primary that keeps committing empty blocks still gets replaced.
    bool progressed = false;
    for (const auto& tx : b->txs)
        progressed |= pending_since_.erase(tx.tx_hash) != 0;
    std::erase_if(pending_, [&](const Transaction& tx) { return !pending_since_.count(tx.tx_hash); });

    if (cfg_.algorithm == Algorithm::Rpbft && is_member(b->height)) {
        auto members = committee(b->height);
        std::vector<NodeId> outsiders;
        for (NodeId n = 0; n < cfg_.n_nodes; ++n)
            if (std::find(members.begin(), members.end(), n) == members.end())
                outsiders.push_back(n);
        if (!outsiders.empty())
            out.push_back({outsiders, msg::Decide{b}});
    }

    reset_slot();
    blocks_.clear();
    decides_.clear();
    fetch_requested_.clear();
    prepared_.reset();
    vc_votes_.clear();
    catchup_.clear();
    vc_target_ = 0;
    if (progressed)
        view_entered_at_ = now;
    replay_buffered(now, out);
    try_propose(now, out);
}

void Replica::reset_slot()
{
    accepted_.reset();
    proposed_ = false;
    sent_commit_ = false;
    quorum_reported_ = false;
    prepares_.clear();
    commits_.clear();
    batch_deadline_.reset();
}

void Replica::try_propose(TimeUs now, Out& out)
{
    std::uint64_t h = next_height();
    if (vc_target_ != 0 || proposed_ || accepted_ || primary_for(view_, h) != id_ || !is_member(h))
        return;
    if (prepared_ && prepared_->block->height == h) {
        propose(prepared_->block, now, out);
        return;
    }
    if (pending_.empty())
        return;
    TimeUs due = pending_since_.at(pending_.front().tx_hash) + cfg_.batch_timeout;
    if (pending_.size() < cfg_.batch_size && now < due) {
        batch_deadline_ = due;
        return;
    }
    std::size_t k = std::min<std::size_t>(cfg_.batch_size, pending_.size());
    std::vector<Transaction> txs(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(k));
    propose(std::make_shared<const Block>(build_block(ledger_, std::move(txs))), now, out);
}

void Replica::propose(BlockPtr block, TimeUs, Out& out)
{
    std::uint64_t h = block->height;
    const Digest d = block->block_hash;
    proposed_ = true;
    batch_deadline_.reset();
    accepted_ = d;
    blocks_[d] = block;
    prepares_[d].insert(id_);
    events_.push_back({ReplicaEvent::Kind::ProposalSent, h, view_, d});
    auto peers = others(committee(h));

    if (behavior_ == Behavior::Equivocate) {
        Block alt = *block;
        alt.txs.resize(alt.txs.size() / 2);
        alt.header_meta = expected_meta(ledger_.registry(), alt.txs, h);
        alt.seal();
        auto alt_ptr = std::make_shared<const Block>(std::move(alt));
        std::vector<NodeId> group_a, group_b;
        for (auto p : peers)
            (equivocation_group_.count(p) ? group_a : group_b).push_back(p);
        blocks_[alt_ptr->block_hash] = alt_ptr;
        out.push_back({group_a, msg::PrePrepare{view_, block}});
        out.push_back({group_a, msg::Prepare{view_, h, d}});
        out.push_back({group_a, msg::Commit{view_, h, d}});
        out.push_back({group_b, msg::PrePrepare{view_, alt_ptr}});
        out.push_back({group_b, msg::Prepare{view_, h, alt_ptr->block_hash}});
        out.push_back({group_b, msg::Commit{view_, h, alt_ptr->block_hash}});
        sent_commit_ = true;
        return;
    }

    out.push_back({peers, msg::PrePrepare{view_, block}});
    out.push_back({peers, msg::Prepare{view_, h, d}});
}

void Replica::start_view_change(std::uint64_t target, TimeUs now, Out& out)
{
    if (target <= view_ || target <= vc_target_)
        return;
    ++stats_.view_changes;
    vc_target_ = target;
    vc_started_at_ = now;
    batch_deadline_.reset();
    msg::ViewChange vc{target, next_height(), prepared_};
    vc_votes_[target][id_] = vc;
    out.push_back({others(committee(next_height())), vc});
    if (vc_votes_[target].size() >= quorum(next_height()))
        enter_view(target, now, out);
}

void Replica::on_view_change(NodeId from, const msg::ViewChange& m, TimeUs now, Out& out)
{
    if (m.height > next_height()) {
        buffered_.emplace_back(from, m);
        return;
    }
    if (m.height < next_height()) {
        // The sender is stuck at a height we already decided; help it catch up.
        out.push_back({{from}, msg::BlockData{ledger_.blocks()[m.height]}});
        return;
    }
    if (m.new_view <= view_ || !is_member(m.height))
        return;
    auto members = committee(m.height);
    if (std::find(members.begin(), members.end(), from) == members.end())
        return reject(m.height);
    if (m.prepared && (!m.prepared->block || m.prepared->block->height != m.height))
        return reject(m.height);
    vc_votes_[m.new_view][from] = m;

    // Join once f+1 replicas want a higher view: at least one of them is honest.
    std::size_t f_c = (cfg_.committee_size() - 1) / 3;
    std::set<NodeId> support;
    std::uint64_t lowest = 0;
    for (auto it = vc_votes_.rbegin(); it != vc_votes_.rend(); ++it) {
        if (it->first <= std::max(view_, vc_target_))
            break;
        for (const auto& [node, vc] : it->second)
            support.insert(node);
        lowest = it->first;
    }
    if (support.size() >= f_c + 1 && lowest > vc_target_)
        start_view_change(lowest, now, out);
    if (vc_target_ != 0 && vc_votes_[vc_target_].size() >= quorum(next_height()))
        enter_view(vc_target_, now, out);
}

void Replica::enter_view(std::uint64_t v, TimeUs now, Out& out)
{
    // Carry forward the highest prepared certificate so a block that may have
    // committed somewhere is re-proposed unchanged.
    std::optional<PreparedCert> best = prepared_;
    for (const auto& [node, vc] : vc_votes_[v])
        if (vc.prepared && (!best || vc.prepared->view > best->view))
            best = vc.prepared;
    if (best && valid_proposal(*best->block)) {
        prepared_ = best;
        blocks_[best->block->block_hash] = best->block;
    }
    view_ = v;
    vc_target_ = 0;
    view_entered_at_ = now;
    reset_slot();
    for (auto it = vc_votes_.begin(); it != vc_votes_.end();)
        it = it->first <= v ? vc_votes_.erase(it) : std::next(it);
    events_.push_back({ReplicaEvent::Kind::ViewEntered, next_height(), v, {}});
    try_propose(now, out);
    replay_buffered(now, out);
}

void Replica::on_decide(NodeId from, const msg::Decide& m, TimeUs now, Out& out)
{
    if (!m.block)
        return reject(0);
    std::uint64_t h = m.block->height;
    if (h < next_height() || is_member(h))
        return;
    if (h > next_height()) {
        buffered_.emplace_back(from, m);
        return;
    }
    auto members = committee(h);
    if (std::find(members.begin(), members.end(), from) == members.end())
        return reject(h);
    const Digest& d = m.block->block_hash;
    blocks_.emplace(d, m.block);
    auto& voters = decides_[d];
    voters.insert(from);
    std::size_t f_c = (cfg_.committee_size() - 1) / 3;
    if (voters.size() >= f_c + 1 && valid_proposal(*blocks_.at(d)))
        commit_block(blocks_.at(d), now, out);
}

void Replica::on_fetch(NodeId from, const msg::FetchBlock& m, Out& out)
{
    if (m.height <= ledger_.height()) {
        const auto& b = ledger_.blocks()[m.height];
        if (b->block_hash == m.digest)
            out.push_back({{from}, msg::BlockData{b}});
        return;
    }
    auto it = blocks_.find(m.digest);
    if (m.height == next_height() && it != blocks_.end())
        out.push_back({{from}, msg::BlockData{it->second}});
}

void Replica::on_block_data(NodeId from, const msg::BlockData& m, TimeUs now, Out& out)
{
    if (!m.block || m.block->height != next_height() || !valid_proposal(*m.block))
        return;
    const Digest& d = m.block->block_hash;
    if (fetch_requested_.count(d)) {
        blocks_.emplace(d, m.block);
        check_committed(now, out);
        return;
    }
    // Unsolicited: f+1 identical copies include at least one honest sender.
    auto& senders = catchup_[d];
    senders.insert(from);
    if (senders.size() >= (cfg_.committee_size() - 1) / 3 + 1)
        commit_block(m.block, now, out);
}

void Replica::replay_buffered(TimeUs now, Out& out)
{
    auto buf = std::exchange(buffered_, {});
    for (auto& [from, m] : buf) {
        auto more = handle(from, m, now);
        out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
}

} // namespace sdnchain::chain
