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

#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <variant>

namespace sdnchain::chain {

using NodeId = std::uint32_t;

enum class Algorithm { Pbft, Rpbft };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct ConsensusConfig {
    Algorithm algorithm = Algorithm::Pbft;
    std::uint32_t n_nodes = 4;
    TimeUs link_delay = 10 * kMs;
    std::uint32_t rpbft_committee_size = 0; // 0 selects max(4, ceil(0.6 n))
    std::uint32_t batch_size = 64;
    TimeUs batch_timeout = 50 * kMs;

    std::uint32_t f() const { return (n_nodes - 1) / 3; }
    std::uint32_t committee_size() const;
    TimeUs view_change_timeout() const { return std::max<TimeUs>(10 * link_delay, kSec); }
    // Throws Error(InvalidArgument) unless n >= 4, n = 3f+1 and committee <= n.
    void validate() const;
};

// Smallest quorum whose pairwise intersections contain an honest node: 2f+1 when n = 3f+1.
std::uint32_t quorum_size(std::uint32_t members);

struct PreparedCert {
    std::uint64_t view = 0;
    BlockPtr block;
};

namespace msg {
struct Request { Transaction tx; };
struct PrePrepare { std::uint64_t view = 0; BlockPtr block; };
struct Prepare { std::uint64_t view = 0; std::uint64_t height = 0; Digest digest{}; };
struct Commit { std::uint64_t view = 0; std::uint64_t height = 0; Digest digest{}; };
struct ViewChange { std::uint64_t new_view = 0; std::uint64_t height = 0; std::optional<PreparedCert> prepared; };
// RPBFT dissemination of a committee-committed block to non-members.
struct Decide { BlockPtr block; };
struct FetchBlock { std::uint64_t height = 0; Digest digest{}; };
struct BlockData { BlockPtr block; };
} // namespace msg

using ConsensusMsg = std::variant<msg::Request, msg::PrePrepare, msg::Prepare, msg::Commit, msg::ViewChange,
                                  msg::Decide, msg::FetchBlock, msg::BlockData>;

std::string_view msg_name(const ConsensusMsg& m);

struct Outbound {
    std::vector<NodeId> to;
    ConsensusMsg msg;
};

struct ReplicaEvent {
    enum class Kind { ProposalSent, PrimaryQuorum, Committed, ViewEntered, Rejected };
    Kind kind;
    std::uint64_t height = 0;
    std::uint64_t view = 0;
    Digest digest{};
};

enum class Behavior { Honest, Equivocate };

// One PBFT/RPBFT replica as a message-in, messages-out state machine. Time only
// enters through the `now` arguments; the owner schedules on_timer() at next_deadline().
class Replica {
public:
    struct Stats {
        std::uint64_t rejected = 0;
        std::uint64_t commits_sent = 0;
        std::size_t min_prepares_at_commit = SIZE_MAX;
        std::uint64_t view_changes = 0;
        std::uint64_t fetches = 0;
    };

    Replica(NodeId id, ConsensusConfig cfg, Behavior behavior = Behavior::Honest,
            std::vector<NodeId> equivocation_group = {});

    std::vector<Outbound> handle(NodeId from, const ConsensusMsg& m, TimeUs now);
    std::vector<Outbound> on_timer(TimeUs now);
    std::optional<TimeUs> next_deadline() const;
    std::vector<ReplicaEvent> drain_events() { return std::exchange(events_, {}); }

    NodeId id() const { return id_; }
    const Ledger& ledger() const { return ledger_; }
    const ConsensusConfig& config() const { return cfg_; }
    std::uint64_t view() const { return view_; }
    bool view_changing() const { return vc_target_ != 0; }
    std::size_t pending() const { return pending_.size(); }
    const Stats& stats() const { return stats_; }

    std::vector<NodeId> committee(std::uint64_t height) const;
    bool is_member(std::uint64_t height) const;
    NodeId primary_for(std::uint64_t view, std::uint64_t height) const;

private:
    using Out = std::vector<Outbound>;

    std::uint64_t next_height() const { return ledger_.height() + 1; }
    std::vector<NodeId> others(const std::vector<NodeId>& group) const;
    std::uint32_t quorum(std::uint64_t height) const;

    void on_request(const msg::Request& m, TimeUs now, Out& out);
    void on_preprepare(NodeId from, const msg::PrePrepare& m, TimeUs now, Out& out);
    void on_vote(NodeId from, std::uint64_t view, std::uint64_t height, const Digest& d, bool commit, const ConsensusMsg& raw,
                 TimeUs now, Out& out);
    void on_view_change(NodeId from, const msg::ViewChange& m, TimeUs now, Out& out);
    void on_decide(NodeId from, const msg::Decide& m, TimeUs now, Out& out);
    void on_fetch(NodeId from, const msg::FetchBlock& m, Out& out);
    void on_block_data(NodeId from, const msg::BlockData& m, TimeUs now, Out& out);

    // Returns 0 if the message belongs to the current (view, height); 1 to buffer; -1 to reject.
    int classify(std::uint64_t view, std::uint64_t height) const;
    bool valid_proposal(const Block& b) const;
    void check_prepared(TimeUs now, Out& out);
    void check_committed(TimeUs now, Out& out);
    void commit_block(const BlockPtr& b, TimeUs now, Out& out);
    void try_propose(TimeUs now, Out& out);
    void propose(BlockPtr block, TimeUs now, Out& out);
    void start_view_change(std::uint64_t target, TimeUs now, Out& out);
    void enter_view(std::uint64_t v, TimeUs now, Out& out);
    void reset_slot();
    void replay_buffered(TimeUs now, Out& out);
    void reject(std::uint64_t height) { ++stats_.rejected; events_.push_back({ReplicaEvent::Kind::Rejected, height, view_, {}}); }

    NodeId id_;
    ConsensusConfig cfg_;
    Behavior behavior_;
    std::set<NodeId> equivocation_group_;
    Ledger ledger_;

    std::uint64_t view_ = 0;
    std::uint64_t vc_target_ = 0; // non-zero while changing view
    TimeUs vc_started_at_ = 0;
    TimeUs view_entered_at_ = 0;

    std::vector<Transaction> pending_;
    std::unordered_map<Digest, TimeUs, DigestHash> pending_since_;

    // Current (view, height) slot.
    std::optional<Digest> accepted_;
    bool proposed_ = false;
    bool sent_commit_ = false;
    bool quorum_reported_ = false;
    std::map<Digest, std::set<NodeId>> prepares_;
    std::map<Digest, std::set<NodeId>> commits_;
    std::set<Digest> fetch_requested_;
    // Blocks seen for the current height, across views.
    std::map<Digest, BlockPtr> blocks_;
    std::map<Digest, std::set<NodeId>> decides_;
    std::map<Digest, std::set<NodeId>> catchup_;
    std::optional<PreparedCert> prepared_;

    std::map<std::uint64_t, std::map<NodeId, msg::ViewChange>> vc_votes_;
    std::vector<std::pair<NodeId, ConsensusMsg>> buffered_;

    std::optional<TimeUs> batch_deadline_;
    std::vector<ReplicaEvent> events_;
    Stats stats_;
};

} // namespace sdnchain::chain
