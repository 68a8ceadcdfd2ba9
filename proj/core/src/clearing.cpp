#include "socmarket/clearing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "socmarket/cost.hpp"

namespace socmarket {

namespace {

std::string tag(const char* base, std::size_t i, std::size_t t) {
  return std::string(base) + "_" + std::to_string(i + 1) + "_" + std::to_string(t + 1);
}

std::string tag(const char* base, std::size_t t) {
  return std::string(base) + "_" + std::to_string(t + 1);
}

}  // namespace

ClearingLp build_clearing_lp(const MarketInstance& inst, double edcr_tol) {
  validate_instance(inst);
  for (std::size_t i = 0; i < inst.storages.size(); ++i) {
    if (!is_edcr(inst.storages[i].bid, edcr_tol)) {
      throw Error(ErrorCode::NonEdcrBid,
                  "storage " + std::to_string(i + 1) + " bid violates the EDCR condition");
    }
  }

  const std::size_t T = inst.horizon;
  const std::size_t G = inst.generators.size();
  const std::size_t S = inst.storages.size();
  const double tau = inst.interval_length;
  const Network& net = inst.network;

  ClearingLp out;
  ClearingLayout& L = out.layout;
  L.horizon = T;
  L.generators = G;
  L.storages = S;
  L.line_rows = net.line_rows();
  for (const auto& s : inst.storages) {
    L.epigraph_row_start.push_back(L.epigraph_rows);
    L.epigraph_rows += s.bid.segments();
  }

  lp::LpProblem& p = out.problem;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < G; ++i) {
      const Generator& g = inst.generators[i];
      p.add_variable(tag("ge", i, t), g.energy_price, 0.0, g.output_max_at(t));
      p.add_variable(tag("gu", i, t), g.regup_price, 0.0, g.regup_capacity_max.value_or(lp::kInf));
      p.add_variable(tag("gd", i, t), g.regdown_price, 0.0,
                     g.regdown_capacity_max.value_or(lp::kInf));
    }
    for (std::size_t i = 0; i < S; ++i) {
      const StorageAsset& s = inst.storages[i];
      p.add_variable(tag("pc", i, t), 0.0, 0.0, s.charge_cap);
      p.add_variable(tag("pd", i, t), 0.0, 0.0, s.discharge_cap);
      p.add_variable(tag("ru", i, t), 0.0, 0.0, s.regup_cap);
      p.add_variable(tag("rd", i, t), 0.0, 0.0, s.regdown_cap);
      p.add_variable(tag("qc", i, t), 0.0, 0.0, lp::kInf);
      p.add_variable(tag("qd", i, t), 0.0, 0.0, lp::kInf);
      p.add_variable(tag("e", i, t + 1), 0.0, s.soc_min, s.soc_max);
    }
  }
  for (std::size_t i = 0; i < S; ++i) p.add_variable(tag("v", i), 1.0, -lp::kInf, lp::kInf);

  // Epigraph of the convexified storage cost.
  for (std::size_t i = 0; i < S; ++i) {
    const StorageAsset& s = inst.storages[i];
    const cost::EpigraphCoeffs co = cost::epigraph_coeffs(s.bid, s.initial_soc);
    for (std::size_t j = 0; j < s.bid.segments(); ++j) {
      lp::Row r;
      r.name = tag("epi", i, j);
      r.terms.emplace_back(L.epigraph(i), -1.0);
      for (std::size_t t = 0; t < T; ++t) {
        r.terms.emplace_back(L.discharge_energy(i, t), s.bid.discharge_prices[j]);
        r.terms.emplace_back(L.charge_energy(i, t), -s.bid.charge_prices[j]);
      }
      r.rhs = -co.alpha[j];
      p.add_le(std::move(r));
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t l = 0; l < L.line_rows; ++l) {
      lp::Row r;
      r.name = tag("line", l, t);
      const auto& sf = net.shift_factors[l];
      double rhs = net.line_limits[l];
      for (std::size_t b = 0; b < net.bus_count; ++b) rhs += sf[b] * inst.demand[t][b];
      for (std::size_t i = 0; i < G; ++i) {
        const double a = sf[inst.generators[i].bus];
        if (a != 0.0) r.terms.emplace_back(L.gen_energy(i, t), a);
      }
      for (std::size_t i = 0; i < S; ++i) {
        const double a = sf[inst.storages[i].bus];
        if (a == 0.0) continue;
        r.terms.emplace_back(L.discharge(i, t), a);
        r.terms.emplace_back(L.charge(i, t), -a);
      }
      r.rhs = rhs;
      p.add_le(std::move(r));
    }

    lp::Row up{{}, -inst.regup_requirement[t], tag("regup", t)};
    lp::Row down{{}, -inst.regdown_requirement[t], tag("regdown", t)};
    for (std::size_t i = 0; i < G; ++i) {
      up.terms.emplace_back(L.gen_regup(i, t), -1.0);
      down.terms.emplace_back(L.gen_regdown(i, t), -1.0);
    }
    for (std::size_t i = 0; i < S; ++i) {
      up.terms.emplace_back(L.regup(i, t), -1.0);
      down.terms.emplace_back(L.regdown(i, t), -1.0);
    }
    p.add_le(std::move(up));
    p.add_le(std::move(down));

    for (std::size_t i = 0; i < G; ++i) {
      const Generator& g = inst.generators[i];
      p.add_le({{{L.gen_energy(i, t), 1.0}, {L.gen_regup(i, t), 1.0}}, g.output_max_at(t), tag("gmax", i, t)});
      p.add_le({{{L.gen_energy(i, t), -1.0}, {L.gen_regdown(i, t), 1.0}}, -g.output_min, tag("gmin", i, t)});
    }

    for (std::size_t i = 0; i < S; ++i) {
      const StorageAsset& s = inst.storages[i];
      const double eta = s.efficiency();
      lp::Row top{{{L.charge_energy(i, t), eta}}, s.soc_max, tag("emax", i, t)};
      lp::Row bottom{{{L.discharge_energy(i, t), 1.0}}, -s.soc_min, tag("emin", i, t)};
      if (t == 0) {
        top.rhs -= s.initial_soc;
        bottom.rhs += s.initial_soc;
      } else {
        top.terms.emplace_back(L.next_soc(i, t - 1), 1.0);
        bottom.terms.emplace_back(L.next_soc(i, t - 1), -1.0);
      }
      p.add_le(std::move(top));
      p.add_le(std::move(bottom));
    }

    lp::Row balance;
    balance.name = tag("balance", t);
    for (std::size_t i = 0; i < G; ++i) balance.terms.emplace_back(L.gen_energy(i, t), 1.0);
    for (std::size_t i = 0; i < S; ++i) {
      balance.terms.emplace_back(L.discharge(i, t), 1.0);
      balance.terms.emplace_back(L.charge(i, t), -1.0);
    }
    for (double d : inst.demand[t]) balance.rhs += d;
    p.add_eq(std::move(balance));

    for (std::size_t i = 0; i < S; ++i) {
      const StorageAsset& s = inst.storages[i];
      const double eta = s.efficiency();
      lp::Row soc{{{L.next_soc(i, t), 1.0}, {L.charge_energy(i, t), -eta}, {L.discharge_energy(i, t), 1.0}},
                  0.0, tag("soc", i, t)};
      if (t == 0) {
        soc.rhs = s.initial_soc;
      } else {
        soc.terms.emplace_back(L.next_soc(i, t - 1), -1.0);
      }
      p.add_eq(std::move(soc));
      p.add_eq({{{L.charge_energy(i, t), 1.0},
                 {L.charge(i, t), -tau},
                 {L.regdown(i, t), -tau * s.gamma_down(t)}},
                0.0,
                tag("qcdef", i, t)});
      p.add_eq({{{L.discharge_energy(i, t), 1.0},
                 {L.discharge(i, t), -tau},
                 {L.regup(i, t), -tau * s.gamma_up(t)}},
                0.0,
                tag("qddef", i, t)});
    }
  }
  return out;
}

ClearingResult extract_solution(const MarketInstance& inst, const ClearingLp& clp,
                                const lp::LpSolution& sol) {
  const ClearingLayout& L = clp.layout;
  const std::size_t T = L.horizon;
  const auto& x = sol.x;
  ClearingResult res;
  DispatchSolution& d = res.dispatch;
  auto grid = [&](std::size_t n) { return std::vector<std::vector<double>>(n, std::vector<double>(T, 0.0)); };
  d.gen_energy = grid(L.generators);
  d.gen_regup = grid(L.generators);
  d.gen_regdown = grid(L.generators);
  for (auto* v : {&d.charge, &d.discharge, &d.regup, &d.regdown, &d.charge_energy, &d.discharge_energy}) {
    *v = grid(L.storages);
  }
  d.soc.assign(L.storages, std::vector<double>(T + 1, 0.0));
  d.epigraph.assign(L.storages, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < L.generators; ++i) {
      d.gen_energy[i][t] = x[L.gen_energy(i, t)];
      d.gen_regup[i][t] = x[L.gen_regup(i, t)];
      d.gen_regdown[i][t] = x[L.gen_regdown(i, t)];
    }
    for (std::size_t i = 0; i < L.storages; ++i) {
      d.charge[i][t] = x[L.charge(i, t)];
      d.discharge[i][t] = x[L.discharge(i, t)];
      d.regup[i][t] = x[L.regup(i, t)];
      d.regdown[i][t] = x[L.regdown(i, t)];
      d.charge_energy[i][t] = x[L.charge_energy(i, t)];
      d.discharge_energy[i][t] = x[L.discharge_energy(i, t)];
      d.soc[i][t + 1] = x[L.next_soc(i, t)];
    }
  }
  for (std::size_t i = 0; i < L.storages; ++i) {
    d.soc[i][0] = inst.storages[i].initial_soc;
    d.epigraph[i] = x[L.epigraph(i)];
  }
  d.objective = sol.objective;

  PriceSolution& pr = res.prices;
  const Network& net = inst.network;
  pr.lambda.resize(T);
  pr.congestion.assign(T, std::vector<double>(L.line_rows, 0.0));
  pr.lmp.assign(T, std::vector<double>(net.bus_count, 0.0));
  pr.regup_price.resize(T);
  pr.regdown_price.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    pr.lambda[t] = 0.0 - sol.y_eq[L.balance_row(t)];
    for (std::size_t l = 0; l < L.line_rows; ++l) pr.congestion[t][l] = sol.y_ub[L.line_row(t, l)] + 0.0;
    for (std::size_t b = 0; b < net.bus_count; ++b) {
      double v = pr.lambda[t];
      for (std::size_t l = 0; l < L.line_rows; ++l) v -= net.shift_factors[l][b] * pr.congestion[t][l];
      pr.lmp[t][b] = v + 0.0;
    }
    pr.regup_price[t] = sol.y_ub[L.regup_row(t)] + 0.0;
    pr.regdown_price[t] = sol.y_ub[L.regdown_row(t)] + 0.0;
  }
  res.certificate = lp::certify(clp.problem, sol);
  res.iterations = sol.iterations;
  return res;
}

ClearingResult clear(const MarketInstance& inst, const lp::SolverOptions& opt) {
  const ClearingLp clp = build_clearing_lp(inst);
  const lp::LpSolution sol = lp::solve(clp.problem, opt);
  std::ostringstream diag;
  diag << "clearing LP with " << clp.problem.num_vars() << " variables, "
       << clp.problem.ub_rows.size() << " inequality and " << clp.problem.eq_rows.size()
       << " equality rows (T=" << inst.horizon << ", " << inst.generators.size() << " generators, "
       << inst.storages.size() << " storages)";
  switch (sol.status) {
    case lp::Status::Optimal:
      break;
    case lp::Status::Infeasible:
      throw Error(ErrorCode::Infeasible, diag.str() + " is infeasible");
    case lp::Status::Unbounded:
      throw Error(ErrorCode::Unbounded, diag.str() + " is unbounded");
    case lp::Status::NumericalFailure:
      throw Error(ErrorCode::NumericalFailure, diag.str() + " failed certification");
  }
  return extract_solution(inst, clp, sol);
}

SimultaneousReport check_no_simultaneous_cd(const DispatchSolution& sol, const PriceSolution& prices,
                                            double tol) {
  SimultaneousReport rep;
  for (std::size_t i = 0; i < sol.charge.size(); ++i) {
    for (std::size_t t = 0; t < sol.charge[i].size(); ++t) {
      const double prod = sol.charge[i][t] * sol.discharge[i][t];
      if (prod > tol) rep.flags.push_back({i, t, prod});
    }
  }
  bool any = false;
  for (const auto& row : prices.lmp) {
    for (double v : row) {
      rep.min_lmp = any ? std::min(rep.min_lmp, v) : v;
      any = true;
    }
  }
  return rep;
}

RegulationCondition check_one_sided_regulation(const StorageAsset& asset, const PriceSolution& prices,
                                               double tau, std::size_t t) {
  if (t >= prices.regup_price.size()) throw Error(ErrorCode::OutOfRange, "interval index beyond horizon");
  RegulationCondition c;
  const SocBid& bid = asset.bid;
  const double eta = bid.efficiency;
  c.spread_value = (bid.discharge_prices.back() - bid.charge_prices.front() / eta) * tau;
  const double gu = asset.gamma_up(t);
  const double gd = asset.gamma_down(t);
  if (gu == 0.0 || gd == 0.0) {
    c.error = ErrorCode::DivisionByZero;
    return c;
  }
  c.price_value = prices.regup_price[t] / gu + prices.regdown_price[t] / (eta * gd);
  c.holds = c.spread_value > c.price_value;
  return c;
}

OneSidedReport check_one_sided_regulation(const MarketInstance& inst, const ClearingResult& res,
                                          double tol) {
  OneSidedReport rep;
  for (std::size_t i = 0; i < inst.storages.size(); ++i) {
    for (std::size_t t = 0; t < inst.horizon; ++t) {
      const RegulationCondition c =
          check_one_sided_regulation(inst.storages[i], res.prices, inst.interval_length, t);
      const double both = std::min(res.dispatch.regup[i][t], res.dispatch.regdown[i][t]);
      rep.max_min_regulation = std::max(rep.max_min_regulation, both);
      if (c.error) {
        ++rep.undefined;
        rep.condition_holds_everywhere = false;
        continue;
      }
      if (!c.holds) {
        rep.condition_holds_everywhere = false;
      } else if (both > tol) {
        rep.complementarity_ok = false;
      }
    }
  }
  return rep;
}

}  // namespace socmarket
