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

#include "generators.hpp"

#include <benchmark/benchmark.h>

#include <sstream>

using namespace sdnchain;

namespace {

std::vector<parallel::SweepCell> small_grid()
{
    return parallel::sweep_grid({chain::Algorithm::Pbft, chain::Algorithm::Rpbft}, {7, 19}, {10 * kMs, 50 * kMs});
}

void BM_ConsensusSweep(benchmark::State& st)
{
    auto cells = small_grid();
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel::consensus_sweep(cells, 10, 1));
}
BENCHMARK(BM_ConsensusSweep)->Unit(benchmark::kMillisecond);

void BM_ConsensusSweepSerial(benchmark::State& st)
{
    auto cells = small_grid();
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel::consensus_sweep_serial(cells, 10, 1));
}
BENCHMARK(BM_ConsensusSweepSerial)->Unit(benchmark::kMillisecond);

void BM_FaultTrials(benchmark::State& st)
{
    parallel::FaultCampaign c{static_cast<std::uint32_t>(st.range(0)), 10 * kMs, 100, 1};
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel::fault_trials(c));
    st.SetItemsProcessed(st.iterations() * c.trials);
}
BENCHMARK(BM_FaultTrials)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_FaultTrialsSerial(benchmark::State& st)
{
    parallel::FaultCampaign c{static_cast<std::uint32_t>(st.range(0)), 10 * kMs, 100, 1};
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel::fault_trials_serial(c));
    st.SetItemsProcessed(st.iterations() * c.trials);
}
BENCHMARK(BM_FaultTrialsSerial)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

struct LookupFixture {
    simnet::FlowTable table;
    std::vector<parallel::Probe> probes;

    explicit LookupFixture(std::size_t entries)
    {
        testing::Rng rng(9);
        for (std::size_t i = 0; i < entries; ++i)
            table.apply(testing::random_table_mod(rng), static_cast<TimeUs>(i));
        probes.resize(20000);
        for (auto& p : probes) {
            p.in_port = static_cast<std::uint32_t>(testing::uniform(rng, 1, 4));
            p.frame = testing::random_frame(rng);
        }
    }
};

void BM_BatchLookup(benchmark::State& st)
{
    LookupFixture fx(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel::batch_lookup(fx.table, fx.probes));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(fx.probes.size()));
}
BENCHMARK(BM_BatchLookup)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_BatchLookupSerial(benchmark::State& st)
{
    LookupFixture fx(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel::batch_lookup_serial(fx.table, fx.probes));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(fx.probes.size()));
}
BENCHMARK(BM_BatchLookupSerial)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

const std::vector<chain::Block>& scenario_blocks()
{
    static const std::vector<chain::Block> blocks = [] {
        auto spec = scenario::builtin_scenario("ddos_basic_active");
        spec.capture = {mw::CaptureMode::All, 1};
        auto r = scenario::run_scenario(spec);
        std::istringstream in(r.chain_export);
        return chain::import_chain(in);
    }();
    return blocks;
}

void BM_VerifyChain(benchmark::State& st)
{
    const auto& blocks = scenario_blocks();
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel::verify_chain(blocks));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(blocks.size()));
}
BENCHMARK(BM_VerifyChain)->Unit(benchmark::kMillisecond);

void BM_VerifyChainSerial(benchmark::State& st)
{
    const auto& blocks = scenario_blocks();
    for (auto _ : st)
        benchmark::DoNotOptimize(chain::verify_chain(blocks));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(blocks.size()));
}
BENCHMARK(BM_VerifyChainSerial)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
