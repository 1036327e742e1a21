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
#include "sdnchain/parallel/kernels.hpp"
#include "sdnchain/scenario/runner.hpp"

#include "../support/generators.hpp"

#include <doctest.h>
#include <omp.h>

#include <sstream>

using namespace sdnchain;
using namespace sdnchain::parallel;

namespace {

// Runs `f` once per thread count and hands back every result.
template <class F>
auto across_thread_counts(F f)
{
    std::vector<decltype(f())> out;
    const int saved = omp_get_max_threads();
    for (int t : {1, 2, 4}) {
        omp_set_num_threads(t);
        out.push_back(f());
    }
    omp_set_num_threads(saved);
    return out;
}

std::vector<chain::Block> scenario_chain()
{
    auto spec = scenario::builtin_scenario("ddos_basic_active");
    spec.duration_s = 6;
    spec.capture = {mw::CaptureMode::All, 1};
    auto r = scenario::run_scenario(spec);
    std::istringstream in(r.chain_export);
    return chain::import_chain(in);
}

} // namespace

TEST_CASE("item seeds are distinct and independent of scheduling")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i)
        seen.insert(item_seed(7, i));
    CHECK(seen.size() == 10000);
    CHECK(item_seed(7, 3) == item_seed(7, 3));
    CHECK(item_seed(7, 3) != item_seed(8, 3));
}

TEST_CASE("sweep grid is the product in algorithm, n, delay order")
{
    auto g = sweep_grid({chain::Algorithm::Pbft, chain::Algorithm::Rpbft}, {7, 19}, {10 * kMs, 20 * kMs, 50 * kMs});
    REQUIRE(g.size() == 12);
    CHECK(g[0].algorithm == chain::Algorithm::Pbft);
    CHECK(g[0].n_nodes == 7);
    CHECK(g[1].link_delay == 20 * kMs);
    CHECK(g[3].n_nodes == 19);
    CHECK(g[6].algorithm == chain::Algorithm::Rpbft);
}

TEST_CASE("consensus sweep equals its serial twin for any thread count")
{
    auto cells = sweep_grid({chain::Algorithm::Pbft, chain::Algorithm::Rpbft}, {4, 7}, {10 * kMs, 20 * kMs});
    auto ref = consensus_sweep_serial(cells, 5, 11);
    for (const auto& got : across_thread_counts([&] { return consensus_sweep(cells, 5, 11); })) {
        REQUIRE(got.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(got[i].cell.n_nodes == ref[i].cell.n_nodes);
            CHECK(got[i].stats.per_round_ms == ref[i].stats.per_round_ms);
            CHECK(got[i].stats.mean_ms == ref[i].stats.mean_ms);
        }
    }
}

TEST_CASE("fault trials equal their serial twin for any thread count")
{
    for (std::uint32_t n : {4u, 7u}) {
        FaultCampaign c{n, 10 * kMs, 40, 3};
        auto ref = fault_trials_serial(c);
        REQUIRE(ref.size() == 40);
        for (const auto& got : across_thread_counts([&] { return fault_trials(c); })) {
            REQUIRE(got.size() == ref.size());
            for (std::size_t i = 0; i < ref.size(); ++i) {
                CHECK(got[i].crashed == ref[i].crashed);
                CHECK(got[i].byzantine_primary == ref[i].byzantine_primary);
                CHECK(got[i].safe == ref[i].safe);
                CHECK(got[i].live == ref[i].live);
                CHECK(got[i].finished_at == ref[i].finished_at);
                CHECK(got[i].view_changes == ref[i].view_changes);
            }
        }
        auto s = summarize(ref);
        CHECK(s.trials == 40);
        CHECK(s.safety_violations == 0);
        std::uint32_t crashed = 0, byz = 0;
        for (const auto& r : ref) {
            crashed += r.crashed;
            byz += r.byzantine_primary;
        }
        CHECK(s.crashed_nodes == crashed);
        CHECK(s.byzantine_trials == byz);
    }
}

TEST_CASE("batch lookup equals the linear scan")
{
    testing::Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        simnet::FlowTable table;
        auto n = testing::uniform(rng, 0, 200);
        for (std::size_t i = 0; i < n; ++i)
            table.apply(testing::random_table_mod(rng), static_cast<TimeUs>(i));
        std::vector<Probe> probes(500);
        for (auto& p : probes) {
            p.in_port = static_cast<std::uint32_t>(testing::uniform(rng, 1, 4));
            p.frame = testing::random_frame(rng);
        }
        auto ref = batch_lookup_serial(table, probes);
        auto entries = table.entries();
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const auto* e = simnet::lookup_linear(entries, probes[i].in_port, probes[i].frame);
            CHECK(ref[i] == (e ? e->seq : 0));
        }
        for (const auto& got : across_thread_counts([&] { return batch_lookup(table, probes); }))
            CHECK(got == ref);
    }
}

TEST_CASE("parallel chain verification agrees with the serial check")
{
    auto blocks = scenario_chain();
    REQUIRE(blocks.size() > 3);
    CHECK(parallel::verify_chain(blocks).ok);
    CHECK(chain::verify_chain(blocks).ok);

    testing::Rng rng(77);
    int caught = 0, trials = 0;
    while (trials < 100) {
        auto copy = blocks;
        auto h = testing::uniform(rng, 1, copy.size() - 1);
        auto& b = copy[h];
        if (b.txs.empty())
            continue;
        auto& tx = b.txs[testing::uniform(rng, 0, b.txs.size() - 1)];
        if (tx.payload.empty())
            continue;
        ++trials;
        auto pos = testing::uniform(rng, 0, tx.payload.size() - 1);
        tx.payload[pos] ^= static_cast<std::uint8_t>(testing::uniform(rng, 1, 255));
        auto serial = chain::verify_chain(copy);
        for (const auto& par : across_thread_counts([&] { return parallel::verify_chain(copy); })) {
            CHECK_FALSE(par.ok);
            CHECK(par.bad_height == serial.bad_height);
        }
        caught += !serial.ok && serial.bad_height == h;
    }
    CHECK(caught == 100);

    // Two corruptions: the lower height is reported.
    auto copy = blocks;
    copy[2].prev_hash[0] ^= 1;
    copy.back().block_hash[5] ^= 1;
    CHECK(parallel::verify_chain(copy).bad_height == 2);
    CHECK(chain::verify_chain(copy).bad_height == 2);
}
