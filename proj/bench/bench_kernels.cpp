// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP counterparts on the default
// scenario. Arg is the number of Monte Carlo trials.

#include <benchmark/benchmark.h>

#include "rsma/monte_carlo.hpp"

namespace {

using rsma::ExecutionPolicy;

template <ExecutionPolicy Policy>
void BM_BuildGainSet(benchmark::State& state) {
    const rsma::SystemConfig config = rsma::SystemConfig::defaults();
    const rsma::DerivedLink link = rsma::derive_link(config);
    const int trials = static_cast<int>(state.range(0));
    for (auto _ : state) {
        rsma::GainSet g = rsma::build_gain_set(config, link, trials, 7, Policy);
        benchmark::DoNotOptimize(g.common.data());
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

template <ExecutionPolicy Policy>
void BM_SaaRates(benchmark::State& state) {
    const rsma::SystemConfig config = rsma::SystemConfig::defaults();
    const rsma::DerivedLink link = rsma::derive_link(config);
    const int trials = static_cast<int>(state.range(0));
    const rsma::GainSet gains = rsma::build_gain_set(config, link, trials, 7);
    const rsma::FblPenalties pen = rsma::FblPenalties::from_config(config);
    rsma::PowerAllocation a = rsma::PowerAllocation::uniform(config.num_users, 0.4);
    for (auto _ : state) {
        rsma::RateEstimate e = rsma::saa_rates_from_gains(gains, a, link, pen, Policy);
        benchmark::DoNotOptimize(e.sum_rate);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

}  // namespace

BENCHMARK(BM_BuildGainSet<ExecutionPolicy::serial>)->Name("build_gain_set/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_BuildGainSet<ExecutionPolicy::parallel>)->Name("build_gain_set/parallel")->Arg(1000)->Arg(10000);
BENCHMARK(BM_SaaRates<ExecutionPolicy::serial>)->Name("saa_rates/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_SaaRates<ExecutionPolicy::parallel>)->Name("saa_rates/parallel")->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
