#include "socmarket/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "socmarket/error.hpp"

namespace socmarket {

using nlohmann::json;

void to_json(json& j, const SocBid& v) {
  j = json{{"breakpoints", v.breakpoints},
           {"charge_prices", v.charge_prices},
           {"discharge_prices", v.discharge_prices},
           {"efficiency", v.efficiency}};
}

void from_json(const json& j, SocBid& v) {
  j.at("breakpoints").get_to(v.breakpoints);
  j.at("charge_prices").get_to(v.charge_prices);
  j.at("discharge_prices").get_to(v.discharge_prices);
  j.at("efficiency").get_to(v.efficiency);
}

void to_json(json& j, const StorageAsset& v) {
  j = json{{"bid", v.bid},
           {"soc_min", v.soc_min},
           {"soc_max", v.soc_max},
           {"charge_cap", v.charge_cap},
           {"discharge_cap", v.discharge_cap},
           {"regdown_cap", v.regdown_cap},
           {"regup_cap", v.regup_cap},
           {"initial_soc", v.initial_soc},
           {"dispatch_fraction_up", v.dispatch_fraction_up},
           {"dispatch_fraction_down", v.dispatch_fraction_down},
           {"bus", v.bus}};
}

void from_json(const json& j, StorageAsset& v) {
  j.at("bid").get_to(v.bid);
  v.soc_min = j.value("soc_min", v.bid.breakpoints.empty() ? 0.0 : v.bid.breakpoints.front());
  v.soc_max = j.value("soc_max", v.bid.breakpoints.empty() ? 0.0 : v.bid.breakpoints.back());
  j.at("charge_cap").get_to(v.charge_cap);
  j.at("discharge_cap").get_to(v.discharge_cap);
  v.regdown_cap = j.value("regdown_cap", 0.0);
  v.regup_cap = j.value("regup_cap", 0.0);
  j.at("initial_soc").get_to(v.initial_soc);
  v.dispatch_fraction_up = j.value("dispatch_fraction_up", std::vector<double>{1.0});
  v.dispatch_fraction_down = j.value("dispatch_fraction_down", std::vector<double>{1.0});
  v.bus = j.value("bus", std::size_t{0});
}

void to_json(json& j, const Generator& v) {
  j = json{{"energy_price", v.energy_price},
           {"regup_price", v.regup_price},
           {"regdown_price", v.regdown_price},
           {"output_max", v.output_max},
           {"output_min", v.output_min},
           {"bus", v.bus}};
  if (v.regup_capacity_max) j["regup_capacity_max"] = *v.regup_capacity_max;
  if (v.regdown_capacity_max) j["regdown_capacity_max"] = *v.regdown_capacity_max;
  if (!v.output_max_profile.empty()) j["output_max_profile"] = v.output_max_profile;
}

void from_json(const json& j, Generator& v) {
  j.at("energy_price").get_to(v.energy_price);
  v.regup_price = j.value("regup_price", 0.0);
  v.regdown_price = j.value("regdown_price", 0.0);
  j.at("output_max").get_to(v.output_max);
  v.output_min = j.value("output_min", 0.0);
  if (j.contains("regup_capacity_max")) v.regup_capacity_max = j.at("regup_capacity_max").get<double>();
  if (j.contains("regdown_capacity_max")) v.regdown_capacity_max = j.at("regdown_capacity_max").get<double>();
  v.output_max_profile = j.value("output_max_profile", std::vector<double>{});
  v.bus = j.value("bus", std::size_t{0});
}

void to_json(json& j, const Network& v) {
  j = json{{"bus_count", v.bus_count}, {"shift_factors", v.shift_factors}, {"line_limits", v.line_limits}};
}

void from_json(const json& j, Network& v) {
  v.bus_count = j.value("bus_count", std::size_t{1});
  v.shift_factors = j.value("shift_factors", std::vector<std::vector<double>>{});
  v.line_limits = j.value("line_limits", std::vector<double>{});
}

void to_json(json& j, const MarketInstance& v) {
  j = json{{"horizon", v.horizon},
           {"interval_length", v.interval_length},
           {"demand", v.demand},
           {"regup_requirement", v.regup_requirement},
           {"regdown_requirement", v.regdown_requirement},
           {"generators", v.generators},
           {"storages", v.storages},
           {"network", v.network}};
}

void from_json(const json& j, MarketInstance& v) {
  j.at("horizon").get_to(v.horizon);
  v.interval_length = j.value("interval_length", 1.0);
  j.at("demand").get_to(v.demand);
  v.regup_requirement = j.value("regup_requirement", std::vector<double>(v.horizon, 0.0));
  v.regdown_requirement = j.value("regdown_requirement", std::vector<double>(v.horizon, 0.0));
  v.generators = j.value("generators", std::vector<Generator>{});
  v.storages = j.value("storages", std::vector<StorageAsset>{});
  v.network = j.value("network", Network{});
}

void to_json(json& j, const Trajectory& v) {
  j = json{{"sub_interval_length", v.sub_interval_length},
           {"mileage_up", v.mileage_up},
           {"mileage_down", v.mileage_down},
           {"fine_soc", v.fine_soc}};
}

void from_json(const json& j, Trajectory& v) {
  j.at("sub_interval_length").get_to(v.sub_interval_length);
  j.at("mileage_up").get_to(v.mileage_up);
  j.at("mileage_down").get_to(v.mileage_down);
  j.at("fine_soc").get_to(v.fine_soc);
}

void to_json(json& j, const DispatchSolution& v) {
  j = json{{"gen_energy", v.gen_energy},
           {"gen_regup", v.gen_regup},
           {"gen_regdown", v.gen_regdown},
           {"charge", v.charge},
           {"discharge", v.discharge},
           {"regup", v.regup},
           {"regdown", v.regdown},
           {"charge_energy", v.charge_energy},
           {"discharge_energy", v.discharge_energy},
           {"soc", v.soc},
           {"epigraph", v.epigraph},
           {"objective", v.objective}};
}

void from_json(const json& j, DispatchSolution& v) {
  j.at("gen_energy").get_to(v.gen_energy);
  j.at("gen_regup").get_to(v.gen_regup);
  j.at("gen_regdown").get_to(v.gen_regdown);
  j.at("charge").get_to(v.charge);
  j.at("discharge").get_to(v.discharge);
  j.at("regup").get_to(v.regup);
  j.at("regdown").get_to(v.regdown);
  j.at("charge_energy").get_to(v.charge_energy);
  j.at("discharge_energy").get_to(v.discharge_energy);
  j.at("soc").get_to(v.soc);
  j.at("epigraph").get_to(v.epigraph);
  j.at("objective").get_to(v.objective);
}

void to_json(json& j, const PriceSolution& v) {
  j = json{{"lambda", v.lambda},
           {"congestion", v.congestion},
           {"lmp", v.lmp},
           {"regup_price", v.regup_price},
           {"regdown_price", v.regdown_price}};
}

void from_json(const json& j, PriceSolution& v) {
  j.at("lambda").get_to(v.lambda);
  j.at("congestion").get_to(v.congestion);
  j.at("lmp").get_to(v.lmp);
  j.at("regup_price").get_to(v.regup_price);
  j.at("regdown_price").get_to(v.regdown_price);
}

void to_json(json& j, const ProfitReport& v) {
  j = json{{"payment", v.payment},
           {"bid_in_cost", v.bid_in_cost},
           {"bid_in_profit", v.bid_in_profit},
           {"true_cost", v.true_cost},
           {"true_profit", v.true_profit},
           {"throughput", v.throughput}};
}

namespace cost {

void to_json(json& j, const StageAction& v) {
  j = json{{"charge", v.charge}, {"discharge", v.discharge}, {"start_soc", v.start_soc}};
}

void from_json(const json& j, StageAction& v) {
  v.charge = j.value("charge", 0.0);
  v.discharge = j.value("discharge", 0.0);
  j.at("start_soc").get_to(v.start_soc);
}

}  // namespace cost

namespace bidgen {

void to_json(json& j, const BidGenResult& v) {
  json report = json::array();
  for (const auto& e : v.cons_c2_report) {
    report.push_back(json{{"action", e.action},
                          {"bid_cost", e.bid_cost},
                          {"true_cost", e.true_cost},
                          {"slack", e.slack}});
  }
  j = json{{"bid", v.bid},
           {"objective_trace", v.objective_trace},
           {"iterations", v.iterations},
           {"violations", v.violations},
           {"cons_c2_report", report}};
}

}  // namespace bidgen

namespace sim {

void to_json(json& j, const ScenarioConfig& v) {
  j = json{{"seed", v.seed},
           {"scenario_count", v.scenario_count},
           {"demand_profile", v.demand_profile},
           {"demand_variance_ratio", v.demand_variance_ratio},
           {"solar_profile", v.solar_profile},
           {"solar_variance_ratio", v.solar_variance_ratio},
           {"regup_requirement", v.regup_requirement},
           {"regdown_requirement", v.regdown_requirement},
           {"nu", v.nu},
           {"horizon", v.horizon},
           {"windows", v.windows},
           {"start_interval", v.start_interval},
           {"initial_soc", v.initial_soc},
           {"sub_steps", v.sub_steps},
           {"grid_levels", v.grid_levels}};
}

void from_json(const json& j, ScenarioConfig& v) {
  const ScenarioConfig d = default_config();
  v.seed = j.value("seed", d.seed);
  v.scenario_count = j.value("scenario_count", d.scenario_count);
  v.demand_profile = j.value("demand_profile", d.demand_profile);
  v.demand_variance_ratio = j.value("demand_variance_ratio", d.demand_variance_ratio);
  v.solar_profile = j.value("solar_profile", d.solar_profile);
  v.solar_variance_ratio = j.value("solar_variance_ratio", d.solar_variance_ratio);
  v.regup_requirement = j.value("regup_requirement", d.regup_requirement);
  v.regdown_requirement = j.value("regdown_requirement", d.regdown_requirement);
  v.nu = j.value("nu", d.nu);
  v.horizon = j.value("horizon", d.horizon);
  v.windows = j.value("windows", d.windows);
  v.start_interval = j.value("start_interval", d.start_interval);
  v.initial_soc = j.value("initial_soc", d.initial_soc);
  v.sub_steps = j.value("sub_steps", d.sub_steps);
  v.grid_levels = j.value("grid_levels", d.grid_levels);
}

void to_json(json& j, const RunMetrics& v) {
  json rows = json::array();
  for (const auto& r : v.rows) {
    json row{{"scenario", r.scenario},
             {"feasible", r.feasible},
             {"system_cost", r.system_cost},
             {"throughput", r.throughput},
             {"payment", r.payment},
             {"bid_in_profit", r.bid_in_profit},
             {"true_profit", r.true_profit}};
    if (!r.feasible) row["failure"] = r.failure;
    rows.push_back(std::move(row));
  }
  j = json{{"label", v.label},
           {"mean_system_cost", v.mean_system_cost},
           {"mean_throughput", v.mean_throughput},
           {"mean_bid_in_profit", v.mean_bid_in_profit},
           {"mean_true_profit", v.mean_true_profit},
           {"excluded", v.excluded},
           {"solves", v.solves},
           {"max_primal_residual", v.max_primal_residual},
           {"max_dual_residual", v.max_dual_residual},
           {"max_duality_gap", v.max_duality_gap},
           {"rows", rows}};
}

void to_json(json& j, const MarketTemplate& v) {
  j = json{{"generators", v.generators}, {"storage", v.storage}, {"interval_length", v.interval_length}};
  if (v.has_solar) j["solar"] = v.solar;
}

void from_json(const json& j, MarketTemplate& v) {
  j.at("generators").get_to(v.generators);
  j.at("storage").get_to(v.storage);
  v.interval_length = j.value("interval_length", 1.0);
  v.has_solar = j.contains("solar");
  if (v.has_solar) j.at("solar").get_to(v.solar);
}

}  // namespace sim

namespace io {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << std::setw(2) << j << '\n';
}

bidgen::MarginalCostSamples read_samples_csv(std::istream& is) {
  bidgen::MarginalCostSamples out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.find_first_of("0123456789") != 0 && line[0] != '-' && line[0] != '.') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    bidgen::MarginalCostSample s;
    if (!(ls >> s.soc >> s.charge_benefit >> s.discharge_cost)) {
      throw Error(ErrorCode::InvalidInput, "malformed sample on line " + std::to_string(lineno));
    }
    out.push_back(s);
  }
  return out;
}

bidgen::MarginalCostSamples read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  return read_samples_csv(in);
}

void write_dispatch_csv(std::ostream& os, const MarketInstance& inst, const DispatchSolution& d,
                        const PriceSolution& p) {
  os << std::setprecision(12);
  os << "storage,interval,charge,discharge,regup,regdown,soc_start,soc_end,lmp,regup_price,regdown_price\n";
  for (std::size_t i = 0; i < d.charge.size(); ++i) {
    const std::size_t bus = inst.storages[i].bus;
    for (std::size_t t = 0; t < inst.horizon; ++t) {
      os << i + 1 << ',' << t + 1 << ',' << d.charge[i][t] << ',' << d.discharge[i][t] << ','
         << d.regup[i][t] << ',' << d.regdown[i][t] << ',' << d.soc[i][t] << ',' << d.soc[i][t + 1] << ','
         << p.lmp[t][bus] << ',' << p.regup_price[t] << ',' << p.regdown_price[t] << '\n';
    }
  }
}

void write_metrics_csv(std::ostream& os, const std::vector<sim::RunMetrics>& runs) {
  os << std::setprecision(12);
  os << "label,scenario,feasible,system_cost,throughput,payment,bid_in_profit,true_profit\n";
  for (const auto& m : runs) {
    for (const auto& r : m.rows) {
      os << m.label << ',' << r.scenario << ',' << (r.feasible ? 1 : 0) << ',' << r.system_cost << ','
         << r.throughput << ',' << r.payment << ',' << r.bid_in_profit << ',' << r.true_profit << '\n';
    }
  }
}

}  // namespace io
}  // namespace socmarket
