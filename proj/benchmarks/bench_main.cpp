#include <benchmark/benchmark.h>

#include <random>

#include "socmarket/bidgen.hpp"
#include "socmarket/clearing.hpp"
#include "socmarket/cost.hpp"
#include "socmarket/robust.hpp"
#include "socmarket/sim.hpp"

using namespace socmarket;

namespace {

const SocBid kBid{{0.0, 3.5, 7.0, 10.5}, {4.0, 3.0, 1.5}, {7.5, 6.5, 5.0}, 1.0};

MarketInstance mixed_instance(std::size_t horizon) {
  const auto fleets = sim::default_fleets();
  auto cfg = sim::default_config();
  cfg.scenario_count = 1;
  const auto sc = sim::generate_scenarios(cfg)[0];
  return sim::make_instance(fleets.mixed, cfg, sc, sim::default_flat_bid().scaled(cfg.nu), 0, horizon, 2.5);
}

void BM_StageCost(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cost::StageAction> acts;
  for (int i = 0; i < 1024; ++i) acts.push_back({u(rng) * 3.0, 0.0, 10.5 * u(rng) * 0.7});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cost::stage_cost(kBid, acts[i++ & 1023]));
  }
}
BENCHMARK(BM_StageCost);

void BM_MultiStageCost(benchmark::State& state) {
  const std::size_t T = static_cast<std::size_t>(state.range(0));
  std::vector<double> qc(T, 0.0), qd(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) (t % 2 ? qd : qc)[t] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(cost::multi_stage_cost(kBid, qc, qd, 5.0));
}
BENCHMARK(BM_MultiStageCost)->Arg(4)->Arg(24);

void BM_RobustStageCost(benchmark::State& state) {
  StorageAsset a;
  a.bid = kBid;
  a.soc_max = 10.5;
  a.charge_cap = a.discharge_cap = 5.0;
  a.regup_cap = a.regdown_cap = 5.0;
  a.initial_soc = 5.0;
  cost::RobustOptions opt;
  opt.sub_steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cost::robust_stage_cost(a, 0.0, 1.0, 1.0, 1.0, 5.0, opt).cost);
}
BENCHMARK(BM_RobustStageCost)->Arg(2)->Arg(3)->Arg(4);

void BM_Clear(benchmark::State& state) {
  const MarketInstance inst = mixed_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(clear(inst).dispatch.objective);
}
BENCHMARK(BM_Clear)->Arg(1)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_GenerateBid(benchmark::State& state) {
  const auto fleets = sim::default_fleets();
  bidgen::BidGenOptions opt;
  opt.segments = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::fit_edcr_bid(fleets.mixed.storage, sim::default_flat_bid(), sim::default_true_bid(), 64, opt).bid);
  }
}
BENCHMARK(BM_GenerateBid)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
