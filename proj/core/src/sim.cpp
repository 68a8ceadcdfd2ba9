#include "socmarket/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "socmarket/cost.hpp"
#include "socmarket/error.hpp"
#include "socmarket/robust.hpp"
#include "socmarket/settlement.hpp"

namespace socmarket::sim {

namespace {

// a:b:c as a vector starting at a and stepping by b while not beyond c.
std::vector<double> range(double a, double b, double c) {
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = a + b * static_cast<double>(k);
    if (v > c + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

StorageAsset default_storage() {
  StorageAsset s;
  s.bid = default_flat_bid();
  s.soc_min = 0.0;
  s.soc_max = 10.5;
  s.charge_cap = 5.0;
  s.discharge_cap = 5.0;
  s.regup_cap = 5.0;
  s.regdown_cap = 5.0;
  s.initial_soc = 2.5;
  return s;
}

bool recoverable(ErrorCode c) {
  return c == ErrorCode::Infeasible || c == ErrorCode::Unbounded || c == ErrorCode::NumericalFailure;
}

void track(RunMetrics& m, const lp::Certificate& c) {
  ++m.solves;
  m.max_primal_residual = std::max(m.max_primal_residual, c.primal_residual);
  m.max_dual_residual = std::max(m.max_dual_residual, c.dual_residual);
  m.max_duality_gap = std::max(m.max_duality_gap, c.duality_gap);
}

void aggregate(RunMetrics& m) {
  double cost = 0.0, thr = 0.0, bip = 0.0, tp = 0.0;
  std::size_t n = 0;
  for (const ScenarioRow& r : m.rows) {
    if (!r.feasible) continue;
    cost += r.system_cost;
    thr += r.throughput;
    bip += r.bid_in_profit;
    tp += r.true_profit;
    ++n;
  }
  m.excluded = m.rows.size() - n;
  if (n == 0) return;
  const double dn = static_cast<double>(n);
  m.mean_system_cost = cost / dn;
  m.mean_throughput = thr / dn;
  m.mean_bid_in_profit = bip / dn;
  m.mean_true_profit = tp / dn;
}

double generator_cost(const MarketInstance& inst, const DispatchSolution& d, std::size_t t) {
  double c = 0.0;
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const Generator& g = inst.generators[i];
    c += g.energy_price * d.gen_energy[i][t] + g.regup_price * d.gen_regup[i][t] +
         g.regdown_price * d.gen_regdown[i][t];
  }
  return c;
}

}  // namespace

std::vector<Scenario> generate_scenarios(const ScenarioConfig& cfg) {
  for (double v : cfg.demand_profile) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidInput, "demand profile must be nonnegative");
  }
  for (double v : cfg.solar_profile) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidInput, "solar profile must be nonnegative");
  }
  if (!(cfg.demand_variance_ratio >= 0.0) || !(cfg.solar_variance_ratio >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "noise variances must be nonnegative");
  }
  std::vector<Scenario> out;
  out.reserve(cfg.scenario_count);
  for (std::size_t k = 0; k < cfg.scenario_count; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32), static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> unit(0.0, 1.0);
    Scenario s;
    for (double mean : cfg.demand_profile) {
      const double sd = std::sqrt(cfg.demand_variance_ratio * mean);
      s.demand.push_back(std::max(0.0, mean + sd * unit(rng)));
    }
    for (double mean : cfg.solar_profile) {
      const double sd = std::sqrt(cfg.solar_variance_ratio * mean);
      s.solar.push_back(std::max(0.0, mean + sd * unit(rng)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

MarketInstance make_instance(const MarketTemplate& market, const ScenarioConfig& cfg,
                             const Scenario& scenario, const SocBid& bid, std::size_t start,
                             std::size_t horizon, double initial_soc) {
  const std::size_t end = start + horizon;
  if (end > scenario.demand.size() || end > cfg.regup_requirement.size() ||
      end > cfg.regdown_requirement.size() || (market.has_solar && end > scenario.solar.size())) {
    throw Error(ErrorCode::InvalidInput, "profiles are shorter than the simulated intervals");
  }
  MarketInstance inst;
  inst.horizon = horizon;
  inst.interval_length = market.interval_length;
  for (std::size_t t = start; t < end; ++t) {
    inst.demand.push_back({scenario.demand[t]});
    inst.regup_requirement.push_back(cfg.regup_requirement[t]);
    inst.regdown_requirement.push_back(cfg.regdown_requirement[t]);
  }
  inst.generators = market.generators;
  if (market.has_solar) {
    Generator solar = market.solar;
    solar.output_max_profile.assign(scenario.solar.begin() + static_cast<std::ptrdiff_t>(start),
                                    scenario.solar.begin() + static_cast<std::ptrdiff_t>(end));
    solar.output_max = *std::max_element(solar.output_max_profile.begin(), solar.output_max_profile.end());
    inst.generators.push_back(std::move(solar));
  }
  StorageAsset storage = market.storage;
  storage.bid = bid;
  storage.initial_soc = initial_soc;
  inst.storages.push_back(std::move(storage));
  return inst;
}

RunMetrics run_one_shot(const MarketTemplate& market, const ScenarioConfig& cfg,
                        const std::vector<Scenario>& scenarios, const BidVariant& variant,
                        const SocBid& true_bid) {
  if (!(cfg.nu > 0.0)) throw Error(ErrorCode::InvalidInput, "bid scale factor must be positive");
  const SocBid bid = variant.bid.scaled(cfg.nu);
  const SocBid truth = true_bid.scaled(cfg.nu);
  RunMetrics m;
  m.label = variant.label;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    ScenarioRow row;
    row.scenario = k;
    const MarketInstance inst =
        make_instance(market, cfg, scenarios[k], bid, cfg.start_interval, cfg.horizon, cfg.initial_soc);
    try {
      const ClearingResult res = clear(inst);
      track(m, res.certificate);
      const ProfitReport rep = settle(inst, res.dispatch, res.prices, 0, truth, cfg.sub_steps, cfg.grid_levels);
      row.system_cost = res.dispatch.objective;
      row.throughput = rep.throughput;
      row.payment = rep.payment;
      row.bid_in_profit = rep.bid_in_profit;
      row.true_profit = rep.true_profit;
      row.soc = res.dispatch.soc[0];
    } catch (const Error& err) {
      if (!recoverable(err.code())) throw;
      row.feasible = false;
      row.failure = err.what();
    }
    m.rows.push_back(std::move(row));
  }
  aggregate(m);
  return m;
}

RunMetrics run_rolling(const MarketTemplate& market, const ScenarioConfig& cfg,
                       const std::vector<Scenario>& scenarios, const BidVariant& variant,
                       const SocBid& true_bid) {
  if (!(cfg.nu > 0.0)) throw Error(ErrorCode::InvalidInput, "bid scale factor must be positive");
  if (cfg.windows == 0 || cfg.horizon == 0) {
    throw Error(ErrorCode::InvalidInput, "windows and horizon must be positive");
  }
  const SocBid bid = variant.bid.scaled(cfg.nu);
  StorageAsset truth_asset = market.storage;
  truth_asset.bid = true_bid.scaled(cfg.nu);
  const double tau = market.interval_length;
  RunMetrics m;
  m.label = variant.label;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    ScenarioRow row;
    row.scenario = k;
    double soc = cfg.initial_soc;
    row.soc.push_back(soc);
    try {
      for (std::size_t w = 0; w < cfg.windows; ++w) {
        const MarketInstance inst = make_instance(market, cfg, scenarios[k], bid, w, cfg.horizon, soc);
        const ClearingResult res = clear(inst);
        track(m, res.certificate);
        const DispatchSolution& d = res.dispatch;
        const cost::StageAction action{d.charge_energy[0][0], d.discharge_energy[0][0], soc};
        const double stage = cost::stage_cost(bid, action);
        row.system_cost += generator_cost(inst, d, 0) + stage;

        const double pay = res.prices.lmp[0][inst.storages[0].bus] * (d.discharge[0][0] - d.charge[0][0]) +
                           res.prices.regup_price[0] * d.regup[0][0] +
                           res.prices.regdown_price[0] * d.regdown[0][0];
        cost::RobustOptions ropt;
        ropt.tau = tau;
        ropt.gamma_up = inst.storages[0].gamma_up(0);
        ropt.gamma_down = inst.storages[0].gamma_down(0);
        ropt.sub_steps = cfg.sub_steps;
        ropt.grid_levels = cfg.grid_levels;
        truth_asset.initial_soc = soc;
        const double true_stage = cost::robust_stage_cost(truth_asset, d.charge[0][0], d.discharge[0][0],
                                                          d.regup[0][0], d.regdown[0][0], soc, ropt)
                                      .cost;
        row.payment += pay;
        row.bid_in_profit += pay - stage;
        row.true_profit += pay - true_stage;
        row.throughput += (d.charge[0][0] + d.discharge[0][0]) * tau + d.regup[0][0] + d.regdown[0][0];

        soc = std::clamp(d.soc[0][1], market.storage.soc_min, market.storage.soc_max);
        row.soc.push_back(soc);
      }
    } catch (const Error& err) {
      if (!recoverable(err.code())) throw;
      row.feasible = false;
      row.failure = err.what();
    }
    m.rows.push_back(std::move(row));
  }
  aggregate(m);
  return m;
}

MarketTemplate mixed_fleet_template() {
  MarketTemplate m;
  std::vector<double> energy(4, 0.0);
  for (double v : range(8.0, 16.96, 246.0)) energy.push_back(v);
  std::vector<double> regup(4, 0.0);
  for (double v : range(4.0, 8.48, 123.0)) regup.push_back(v);
  const std::vector<double> regdown = range(3.5, 3.5, 67.0);
  std::vector<double> cap(5, 200.0);
  cap.insert(cap.end(), 13, 150.0);
  cap.push_back(1000.0);
  std::vector<double> regcap(18, 10.0);
  regcap.push_back(200.0);
  for (std::size_t i = 0; i < 19; ++i) {
    Generator g;
    g.energy_price = energy[i];
    g.regup_price = regup[i];
    g.regdown_price = regdown[i];
    g.output_max = cap[i];
    g.regup_capacity_max = regcap[i];
    g.regdown_capacity_max = regcap[i];
    m.generators.push_back(g);
  }
  m.has_solar = true;
  m.solar.output_max = 500.0;
  m.solar.regup_capacity_max = 10.0;
  m.solar.regdown_capacity_max = 10.0;
  m.storage = default_storage();
  return m;
}

MarketTemplate ladder_fleet_template() {
  MarketTemplate m;
  for (double price : range(10.0, 5.0, 160.0)) {
    Generator g;
    g.energy_price = price;
    g.output_max = 30.0;
    g.regup_capacity_max = 0.0;
    g.regdown_capacity_max = 0.0;
    m.generators.push_back(g);
  }
  m.storage = default_storage();
  m.storage.regup_cap = 0.0;
  m.storage.regdown_cap = 0.0;
  return m;
}

DefaultFleets default_fleets() { return {mixed_fleet_template(), ladder_fleet_template()}; }

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.demand_profile = {1350, 1290, 1250, 1230, 1260, 1380, 1650, 1980, 2250, 2320, 2260, 2180,
                      2120, 2100, 2140, 2250, 2450, 2620, 2680, 2580, 2380, 2100, 1800, 1550};
  c.solar_profile = {0, 0, 0, 0, 0, 0, 20, 80, 160, 240, 300, 330,
                     320, 280, 200, 110, 30, 0, 0, 0, 0, 0, 0, 0};
  c.regup_requirement.resize(24);
  c.regdown_requirement.resize(24);
  for (std::size_t t = 0; t < 24; ++t) {
    c.regup_requirement[t] = t % 2 == 0 ? 60.0 : 0.0;
    c.regdown_requirement[t] = t % 2 == 0 ? 0.0 : 60.0;
  }
  c.nu = 21.0;
  return c;
}

SocBid default_true_bid() {
  return SocBid{{0.0, 3.5, 7.0, 10.5}, {4.0, 3.0, 1.5}, {8.0, 6.5, 5.0}, 0.9};
}

SocBid default_flat_bid() { return SocBid::flat(0.0, 10.5, 1.5, 8.0, 0.9); }

bidgen::BidGenResult fit_edcr_bid(const StorageAsset& asset, const SocBid& flat_bid, const SocBid& true_bid,
                                  std::size_t sample_count, const bidgen::BidGenOptions& opt) {
  const bidgen::MarginalCostSamples samples = bidgen::sample_bid(true_bid, sample_count);
  auto truth = [&true_bid](const cost::StageAction& a) { return bidgen::true_action_cost(true_bid, a); };
  return bidgen::generate(flat_bid, samples, asset, truth, opt);
}

}  // namespace socmarket::sim
