#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "socmarket/bidgen.hpp"
#include "socmarket/clearing.hpp"
#include "socmarket/cost.hpp"
#include "socmarket/error.hpp"
#include "socmarket/io.hpp"
#include "socmarket/model.hpp"
#include "socmarket/robust.hpp"
#include "socmarket/settlement.hpp"
#include "socmarket/sim.hpp"

namespace socmarket::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
  std::string input;
  std::string second;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> nu;
  std::optional<std::size_t> windows;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> scenarios;
  std::optional<std::size_t> grid_levels;
  std::string true_bid;
  std::string samples;
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::Infeasible:
    case ErrorCode::Unbounded:
    case ErrorCode::InfeasibleConstraints:
      return kExitInfeasible;
    case ErrorCode::NumericalFailure:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

fs::path out_dir(const Flags& f) {
  fs::path dir(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidInput, "cannot create " + dir.string());
  return dir;
}

// Accepts either the object itself or an object wrapping it under `key`.
json unwrap(const json& j, const char* key) { return j.contains(key) ? j.at(key) : j; }

int cmd_validate_bid(const Flags& f) {
  const SocBid bid = unwrap(io::read_json(f.input), "bid").get<SocBid>();
  const double tol = f.tol.value_or(kDefaultEdcrTol);
  const BidValidation v = validate_bid(bid);
  const bool edcr = v.ok() && is_edcr(bid, tol);
  static const char* names[] = {"none", "malformed", "monotonicity", "spread", "breakpoint"};
  const json report{{"ok", v.ok()},
                    {"violation", names[static_cast<int>(v.violation)]},
                    {"message", v.message},
                    {"edcr", edcr},
                    {"segments", bid.segments()}};
  io::write_json((out_dir(f) / "validation.json").string(), report);
  std::cout << "validate-bid ok=" << (v.ok() ? "true" : "false") << " edcr=" << (edcr ? "true" : "false");
  if (!v.ok()) std::cout << " " << v.message;
  std::cout << '\n';
  return v.ok() ? kExitOk : kExitInput;
}

int cmd_cost_eval(const Flags& f) {
  const json in = io::read_json(f.input);
  const SocBid bid = in.at("bid").get<SocBid>();
  require_valid_bid(bid);
  const double tol = f.tol.value_or(kDefaultEdcrTol);
  const double s = in.at("start_soc").get<double>();
  const auto qc = in.value("charge", std::vector<double>{});
  const auto qd = in.value("discharge", std::vector<double>(qc.size(), 0.0));
  if (qc.size() != qd.size()) throw Error(ErrorCode::DimensionMismatch, "charge and discharge lengths differ");
  const bool edcr = is_edcr(bid, tol);

  json report{{"edcr", edcr}};
  if (!qc.empty()) {
    const auto path = cost::soc_path(bid, qc, qd, s);
    std::vector<double> stage;
    std::vector<double> threecase;
    for (std::size_t t = 0; t < qc.size(); ++t) {
      const cost::StageAction a{qc[t], qd[t], path[t]};
      stage.push_back(cost::stage_cost(bid, a));
      if (edcr) threecase.push_back(cost::stage_cost_threecase(bid, a));
    }
    report["soc_path"] = path;
    report["stage_cost"] = stage;
    if (edcr) report["stage_cost_threecase"] = threecase;
    report["multi_stage_cost"] = cost::multi_stage_cost(bid, qc, qd, s);
  }
  if (in.contains("trajectory")) {
    const json& tj = in.at("trajectory");
    const Trajectory traj = tj.at("path").get<Trajectory>();
    report["trajectory_cost"] = cost::exact_trajectory_cost(bid, tj.value("base_charge", 0.0),
                                                             tj.value("base_discharge", 0.0), traj);
  }
  io::write_json((out_dir(f) / "cost.json").string(), report);
  std::cout << "cost-eval edcr=" << (edcr ? "true" : "false");
  if (report.contains("multi_stage_cost")) std::cout << " multi_stage_cost=" << report["multi_stage_cost"];
  if (report.contains("trajectory_cost")) std::cout << " trajectory_cost=" << report["trajectory_cost"];
  std::cout << '\n';
  return kExitOk;
}

int cmd_robust_cost(const Flags& f) {
  const json in = io::read_json(f.input);
  const StorageAsset asset = in.at("asset").get<StorageAsset>();
  validate_asset(asset);
  cost::RobustOptions opt;
  opt.tau = in.value("tau", 1.0);
  opt.gamma_up = in.value("gamma_up", asset.gamma_up(0));
  opt.gamma_down = in.value("gamma_down", asset.gamma_down(0));
  opt.sub_steps = in.value("sub_steps", opt.sub_steps);
  opt.grid_levels = f.grid_levels.value_or(in.value("grid_levels", opt.grid_levels));
  const double soc = in.value("soc", asset.initial_soc);
  const double pc = in.value("p_charge", 0.0);
  const double pd = in.value("p_discharge", 0.0);
  const double ru = in.value("r_up", 0.0);
  const double rd = in.value("r_down", 0.0);
  const cost::RobustResult r = cost::robust_stage_cost(asset, pc, pd, ru, rd, soc, opt);
  const cost::StageAction a{(pc + opt.gamma_down * rd) * opt.tau, (pd + opt.gamma_up * ru) * opt.tau, soc};
  const json report{{"cost", r.cost},
                    {"best_cost", r.best_cost},
                    {"trajectories", r.trajectories},
                    {"worst", r.worst},
                    {"stage_cost", cost::stage_cost(asset.bid, a)},
                    {"edcr", is_edcr(asset.bid, f.tol.value_or(kDefaultEdcrTol))}};
  io::write_json((out_dir(f) / "robust.json").string(), report);
  std::cout << "robust-cost cost=" << r.cost << " best=" << r.best_cost << " trajectories=" << r.trajectories
            << '\n';
  return kExitOk;
}

int cmd_clear(const Flags& f) {
  const MarketInstance inst = unwrap(io::read_json(f.input), "instance").get<MarketInstance>();
  lp::SolverOptions opt;
  if (f.tol) {
    opt.feasibility_tol = *f.tol;
    opt.optimality_tol = *f.tol;
  }
  const ClearingResult res = clear(inst, opt);
  const fs::path dir = out_dir(f);
  json dispatch = res.dispatch;
  dispatch["lambda"] = res.prices.lambda;
  io::write_json((dir / "dispatch.json").string(), dispatch);
  io::write_json((dir / "prices.json").string(), res.prices);
  std::ofstream csv(dir / "dispatch.csv");
  io::write_dispatch_csv(csv, inst, res.dispatch, res.prices);
  const json summary{{"objective", res.dispatch.objective},
                     {"iterations", res.iterations},
                     {"primal_residual", res.certificate.primal_residual},
                     {"dual_residual", res.certificate.dual_residual},
                     {"duality_gap", res.certificate.duality_gap}};
  io::write_json((dir / "clearing.json").string(), summary);
  std::cout << "clear objective=" << res.dispatch.objective << " lambda[0]=" << res.prices.lambda.at(0)
            << " gap=" << res.certificate.duality_gap << '\n';
  return kExitOk;
}

int cmd_settle(const Flags& f) {
  const MarketInstance inst = unwrap(io::read_json(f.input), "instance").get<MarketInstance>();
  validate_instance(inst);
  const fs::path cleared(f.second);
  const DispatchSolution d = io::read_json((cleared / "dispatch.json").string()).get<DispatchSolution>();
  const PriceSolution p = io::read_json((cleared / "prices.json").string()).get<PriceSolution>();
  if (d.charge.size() != inst.storages.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dispatch does not match the instance storages");
  }
  std::optional<SocBid> truth;
  if (!f.true_bid.empty()) truth = unwrap(io::read_json(f.true_bid), "bid").get<SocBid>();
  const std::size_t levels = f.grid_levels.value_or(8);
  json reports = json::array();
  for (std::size_t i = 0; i < inst.storages.size(); ++i) {
    const SocBid& tb = truth ? *truth : inst.storages[i].bid;
    const ProfitReport r = settle(inst, d, p, i, tb, 2, levels);
    reports.push_back(r);
    std::cout << "settle storage=" << i + 1 << " payment=" << r.payment << " bid_in_profit=" << r.bid_in_profit
              << " true_profit=" << r.true_profit << '\n';
  }
  io::write_json((out_dir(f) / "profit.json").string(), reports);
  return kExitOk;
}

int cmd_gen_bid(const Flags& f) {
  const json in = io::read_json(f.input);
  const SocBid flat = in.at("flat_bid").get<SocBid>();
  StorageAsset asset = in.at("asset").get<StorageAsset>();
  std::optional<SocBid> truth;
  if (in.contains("true_bid")) truth = in.at("true_bid").get<SocBid>();

  bidgen::MarginalCostSamples samples;
  if (!f.samples.empty()) {
    samples = io::read_samples_csv(f.samples);
  } else if (in.contains("samples")) {
    for (const auto& s : in.at("samples")) {
      samples.push_back({s.at("soc").get<double>(), s.at("charge_benefit").get<double>(),
                         s.at("discharge_cost").get<double>()});
    }
  } else if (truth) {
    samples = bidgen::sample_bid(*truth, in.value("sample_count", std::size_t{64}));
  } else {
    throw Error(ErrorCode::InvalidInput, "gen-bid needs samples, a samples CSV, or a true_bid");
  }

  bidgen::BidGenOptions opt;
  opt.segments = in.value("segments", opt.segments);
  opt.max_iters = in.value("max_iters", opt.max_iters);
  opt.tau = in.value("tau", opt.tau);
  opt.strict = in.value("strict", opt.strict);
  if (f.tol) opt.tol = *f.tol;
  bidgen::TrueCostFn true_cost;
  if (truth) {
    true_cost = [&truth](const cost::StageAction& a) { return bidgen::true_action_cost(*truth, a); };
  } else {
    true_cost = [&flat](const cost::StageAction& a) { return cost::stage_cost(flat, a); };
  }
  const bidgen::BidGenResult res = bidgen::generate(flat, samples, asset, true_cost, opt);
  const fs::path dir = out_dir(f);
  io::write_json((dir / "bid.json").string(), res.bid);
  io::write_json((dir / "bidgen.json").string(), res);
  std::cout << "gen-bid segments=" << res.bid.segments() << " iterations=" << res.iterations
            << " objective=" << res.objective_trace.back() << " violations=" << res.violations << '\n';
  return kExitOk;
}

int cmd_simulate(const Flags& f) {
  json in = json::object();
  if (!f.input.empty()) in = io::read_json(f.input);

  sim::MarketTemplate market;
  if (in.contains("market")) {
    market = in.at("market").get<sim::MarketTemplate>();
  } else {
    const std::string fleet = in.value("fleet", std::string("mixed"));
    if (fleet == "mixed") {
      market = sim::mixed_fleet_template();
    } else if (fleet == "ladder") {
      market = sim::ladder_fleet_template();
    } else {
      throw Error(ErrorCode::InvalidInput, "unknown fleet '" + fleet + "'");
    }
  }
  sim::ScenarioConfig cfg = in.contains("config") ? in.at("config").get<sim::ScenarioConfig>() : sim::default_config();
  std::size_t rolling_horizon = in.value("rolling_horizon", std::size_t{4});
  if (f.seed) cfg.seed = *f.seed;
  if (f.nu) cfg.nu = *f.nu;
  if (f.windows) cfg.windows = *f.windows;
  if (f.scenarios) cfg.scenario_count = *f.scenarios;
  if (f.grid_levels) cfg.grid_levels = *f.grid_levels;
  if (f.horizon) {
    cfg.horizon = *f.horizon;
    rolling_horizon = *f.horizon;
  }
  const std::string mode = in.value("mode", std::string("both"));
  if (mode != "one_shot" && mode != "rolling" && mode != "both") {
    throw Error(ErrorCode::InvalidInput, "mode must be one_shot, rolling or both");
  }

  const SocBid true_bid = in.contains("true_bid") ? in.at("true_bid").get<SocBid>() : sim::default_true_bid();
  std::vector<sim::BidVariant> variants;
  if (in.contains("variants")) {
    for (const auto& v : in.at("variants")) variants.push_back({v.at("label"), v.at("bid").get<SocBid>()});
  } else {
    const SocBid flat = in.contains("flat_bid") ? in.at("flat_bid").get<SocBid>() : sim::default_flat_bid();
    variants.push_back({"flat", flat});
    variants.push_back({"edcr", sim::fit_edcr_bid(market.storage, flat, true_bid).bid});
  }

  const std::vector<sim::Scenario> scenarios = sim::generate_scenarios(cfg);
  std::vector<sim::RunMetrics> runs;
  json out{{"config", cfg}, {"rolling_horizon", rolling_horizon}, {"runs", json::array()}};
  for (const auto& v : variants) {
    out["bids"][v.label] = v.bid;
    if (mode != "rolling") {
      sim::RunMetrics m = sim::run_one_shot(market, cfg, scenarios, v, true_bid);
      m.label = "one_shot/" + v.label;
      runs.push_back(std::move(m));
    }
    if (mode != "one_shot") {
      sim::ScenarioConfig rc = cfg;
      rc.horizon = rolling_horizon;
      sim::RunMetrics m = sim::run_rolling(market, rc, scenarios, v, true_bid);
      m.label = "rolling/" + v.label;
      runs.push_back(std::move(m));
    }
  }
  for (const auto& m : runs) {
    out["runs"].push_back(m);
    std::cout << "simulate " << m.label << " system_cost=" << m.mean_system_cost
              << " throughput=" << m.mean_throughput << " bid_in_profit=" << m.mean_bid_in_profit
              << " true_profit=" << m.mean_true_profit << " excluded=" << m.excluded << '\n';
  }
  const fs::path dir = out_dir(f);
  io::write_json((dir / "metrics.json").string(), out);
  std::ofstream csv(dir / "metrics.csv");
  io::write_metrics_csv(csv, runs);
  return kExitOk;
}

void write_error(const Flags& f, int code, const std::string& message) {
  std::error_code ec;
  if (!fs::is_directory(f.out, ec)) return;
  std::ofstream out(fs::path(f.out) / "error.json");
  out << json{{"exit_code", code}, {"message", message}}.dump(2) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Energy and regulation market clearing with SoC-dependent storage bids", "socmarket"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* sub) { sub->add_option("-o,--out", f.out, "Output directory"); };

  auto* validate = app.add_subcommand("validate-bid", "Check bid structure and EDCR");
  validate->add_option("bid", f.input, "Bid JSON")->required();
  validate->add_option("--tol", f.tol, "EDCR tolerance");
  common(validate);

  auto* cost_eval = app.add_subcommand("cost-eval", "Evaluate stage and multi-interval costs");
  cost_eval->add_option("input", f.input, "Cost query JSON")->required();
  cost_eval->add_option("--tol", f.tol, "EDCR tolerance");
  common(cost_eval);

  auto* robust = app.add_subcommand("robust-cost", "Worst-case regulation cost by enumeration");
  robust->add_option("input", f.input, "Robust query JSON")->required();
  robust->add_option("--grid-levels", f.grid_levels, "Mileage levels per sub-interval");
  robust->add_option("--tol", f.tol, "EDCR tolerance");
  common(robust);

  auto* clear_cmd = app.add_subcommand("clear", "Clear a market instance");
  clear_cmd->add_option("instance", f.input, "Instance JSON")->required();
  clear_cmd->add_option("--tol", f.tol, "Simplex feasibility and optimality tolerance");
  common(clear_cmd);

  auto* settle_cmd = app.add_subcommand("settle", "Settle storage from clear outputs");
  settle_cmd->add_option("instance", f.input, "Instance JSON")->required();
  settle_cmd->add_option("cleared", f.second, "Directory holding dispatch.json and prices.json")->required();
  settle_cmd->add_option("--true-bid", f.true_bid, "Bid JSON used for true cost");
  settle_cmd->add_option("--grid-levels", f.grid_levels, "Mileage levels per sub-interval");
  common(settle_cmd);

  auto* gen = app.add_subcommand("gen-bid", "Fit an EDCR bid to marginal cost samples");
  gen->add_option("config", f.input, "Bid generation JSON")->required();
  gen->add_option("--samples", f.samples, "Samples CSV (soc,charge_benefit,discharge_cost)");
  gen->add_option("--tol", f.tol, "Stopping tolerance on the fit error");
  common(gen);

  auto* simulate = app.add_subcommand("simulate", "Run one-shot and rolling Monte-Carlo experiments");
  simulate->add_option("config", f.input, "Experiment JSON");
  simulate->add_option("--seed", f.seed, "Scenario seed");
  simulate->add_option("--nu", f.nu, "Bid scale factor")->check(CLI::PositiveNumber);
  simulate->add_option("--windows", f.windows, "Rolling window count");
  simulate->add_option("--horizon", f.horizon, "Intervals per clearing")->check(CLI::PositiveNumber);
  simulate->add_option("--scenarios", f.scenarios, "Scenario count");
  simulate->add_option("--grid-levels", f.grid_levels, "Mileage levels per sub-interval");
  common(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  int code = kExitOk;
  std::string message;
  try {
    if (*validate) return cmd_validate_bid(f);
    if (*cost_eval) return cmd_cost_eval(f);
    if (*robust) return cmd_robust_cost(f);
    if (*clear_cmd) return cmd_clear(f);
    if (*settle_cmd) return cmd_settle(f);
    if (*gen) return cmd_gen_bid(f);
    if (*simulate) return cmd_simulate(f);
  } catch (const Error& e) {
    code = exit_code(e.code());
    message = e.what();
  } catch (const nlohmann::json::exception& e) {
    code = kExitInput;
    message = std::string("malformed input: ") + e.what();
  } catch (const std::out_of_range& e) {
    code = kExitInput;
    message = std::string("out of range: ") + e.what();
  }
  std::cerr << "error: " << message << '\n';
  write_error(f, code, message);
  return code;
}

}  // namespace socmarket::cli
