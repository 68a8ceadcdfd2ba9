#include "socmarket/bidgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socmarket/error.hpp"
#include "socmarket/qp.hpp"

namespace socmarket::bidgen {

namespace {

constexpr double kViolationTol = 1e-9;

// Cumulative charge value piece g_j(e) for arbitrary charge prices.
double charge_piece(const std::vector<double>& e, const std::vector<double>& cc, double eta,
                    std::size_t j, double soc) {
  double v = cc[j] * (soc - e[0]);
  for (std::size_t k = 0; k < j; ++k) v += (cc[k] - cc[k + 1]) * (e[k + 1] - e[0]);
  return v / eta;
}

// Coefficients of piece j of the single-stage cost as a linear function of
// (c^c, c^d) for fixed breakpoints and action.
std::vector<double> piece_coeffs(const SocBid& bid, std::size_t j, const cost::StageAction& a) {
  const std::size_t k_count = bid.segments();
  const std::size_t m = segment_index(bid, a.start_soc);
  std::vector<double> coeffs(2 * k_count, 0.0);
  for (std::size_t i = 0; i < k_count; ++i) {
    std::vector<double> unit(k_count, 0.0);
    unit[i] = 1.0;
    coeffs[i] = charge_piece(bid.breakpoints, unit, bid.efficiency, m, a.start_soc) -
                charge_piece(bid.breakpoints, unit, bid.efficiency, j, a.start_soc);
  }
  coeffs[j] -= a.charge;
  coeffs[k_count + j] += a.discharge;
  return coeffs;
}

std::size_t active_piece(const SocBid& bid, const cost::StageAction& a) {
  const cost::EpigraphCoeffs co = cost::epigraph_coeffs(bid, a.start_soc);
  std::size_t best = 0;
  double value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bid.segments(); ++j) {
    const double v = co.alpha[j] + bid.discharge_prices[j] * a.discharge - bid.charge_prices[j] * a.charge;
    if (v > value) {
      value = v;
      best = j;
    }
  }
  return best;
}

std::vector<ConsC2Entry> cons_c2(const SocBid& bid, const StorageAsset& asset, double tau,
                                 const TrueCostFn& true_cost, std::size_t& violations) {
  StorageAsset a = asset;
  a.bid = bid;
  std::vector<ConsC2Entry> out;
  violations = 0;
  for (const cost::StageAction& act : action_set(a, asset.initial_soc, tau)) {
    ConsC2Entry e;
    e.action = act;
    e.bid_cost = cost::stage_cost(bid, act);
    e.true_cost = true_cost(act);
    e.slack = e.bid_cost - e.true_cost;
    if (e.slack < -kViolationTol) ++violations;
    out.push_back(e);
  }
  return out;
}

std::vector<double> uniform_breakpoints(double lo, double hi, std::size_t k) {
  std::vector<double> e(k + 1);
  for (std::size_t i = 0; i <= k; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k);
  e.back() = hi;
  return e;
}

}  // namespace

double fit_error(const SocBid& bid, const MarginalCostSamples& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) {
    const std::size_t k = segment_index(bid, s.soc);
    const double dc = bid.charge_prices[k] - s.charge_benefit;
    const double dd = bid.discharge_prices[k] - s.discharge_cost;
    sum += dc * dc + dd * dd;
  }
  return sum / static_cast<double>(samples.size());
}

PriceFit fit_price_step(const std::vector<double>& breakpoints, const MarginalCostSamples& samples,
                        const PriceBounds& bounds, double efficiency, double spread_margin,
                        const std::vector<PriceCut>& cuts) {
  if (breakpoints.size() < 2) throw Error(ErrorCode::InvalidInput, "at least two breakpoints are required");
  if (samples.empty()) throw Error(ErrorCode::InvalidInput, "no marginal cost samples");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw Error(ErrorCode::InvalidInput, "efficiency must lie in (0, 1]");
  const std::size_t K = breakpoints.size() - 1;
  const std::size_t n = 2 * K;
  const double eta = efficiency;

  SocBid shape;
  shape.breakpoints = breakpoints;
  shape.charge_prices.assign(K, 0.0);
  shape.discharge_prices.assign(K, 0.0);
  shape.efficiency = eta;

  qp::QpProblem p;
  p.n = n;
  p.hessian.assign(n * n, 0.0);
  p.linear.assign(n, 0.0);
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const auto& s : samples) {
    const std::size_t k = segment_index(shape, s.soc);
    p.hessian[k * n + k] += 2.0 * w;
    p.hessian[(K + k) * n + K + k] += 2.0 * w;
    p.linear[k] -= 2.0 * w * s.charge_benefit;
    p.linear[K + k] -= 2.0 * w * s.discharge_cost;
    p.constant += w * (s.charge_benefit * s.charge_benefit + s.discharge_cost * s.discharge_cost);
  }

  for (std::size_t k = 0; k + 1 < K; ++k) {
    p.eq_rows.push_back({{{k, 1.0}, {k + 1, -1.0}, {K + k, -eta}, {K + k + 1, eta}}, 0.0, ""});
    p.ub_rows.push_back({{{k + 1, 1.0}, {k, -1.0}}, 0.0, ""});
    p.ub_rows.push_back({{{K + k + 1, 1.0}, {K + k, -1.0}}, 0.0, ""});
  }
  p.ub_rows.push_back({{{0, 1.0 / eta}, {2 * K - 1, -1.0}}, -spread_margin, ""});
  for (std::size_t k = 0; k < K; ++k) {
    p.ub_rows.push_back({{{k, -1.0}}, -bounds.charge_min, ""});
    p.ub_rows.push_back({{{k, 1.0}, {K + k, -1.0}}, 0.0, ""});
    p.ub_rows.push_back({{{K + k, 1.0}}, bounds.discharge_max, ""});
  }
  for (const PriceCut& c : cuts) {
    if (c.coeffs.size() != n) throw Error(ErrorCode::DimensionMismatch, "cut length must be 2K");
    lp::Row r;
    for (std::size_t j = 0; j < n; ++j) {
      if (c.coeffs[j] != 0.0) r.terms.emplace_back(j, -c.coeffs[j]);
    }
    r.rhs = -c.rhs;
    p.ub_rows.push_back(std::move(r));
  }

  const qp::QpSolution sol = qp::solve(p);
  PriceFit fit;
  fit.charge_prices.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(K));
  fit.discharge_prices.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(K), sol.x.end());
  fit.objective = sol.objective;
  fit.stationarity = sol.stationarity;
  return fit;
}

std::vector<double> fit_breakpoint_step(const std::vector<double>& charge_prices,
                                        const std::vector<double>& discharge_prices,
                                        const MarginalCostSamples& samples, double soc_min,
                                        double soc_max, double /*efficiency*/) {
  const std::size_t K = charge_prices.size();
  if (K == 0 || discharge_prices.size() != K) {
    throw Error(ErrorCode::DimensionMismatch, "price vectors must be nonempty and of equal length");
  }
  if (K == 1) return {soc_min, soc_max};

  MarginalCostSamples sorted = samples;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MarginalCostSample& a, const MarginalCostSample& b) { return a.soc < b.soc; });
  const std::size_t N = sorted.size();

  // cost[k][c]: squared error of samples 0..c-1 priced at segment k (prefix sums).
  std::vector<std::vector<double>> prefix(K, std::vector<double>(N + 1, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < N; ++i) {
      const double dc = charge_prices[k] - sorted[i].charge_benefit;
      const double dd = discharge_prices[k] - sorted[i].discharge_cost;
      prefix[k][i + 1] = prefix[k][i] + dc * dc + dd * dd;
    }
  }
  // Cut c places samples [0, c) below it. A cut between equal SoCs is not
  // realizable.
  auto allowed = [&](std::size_t c) {
    return c == 0 || c == N || sorted[c - 1].soc < sorted[c].soc;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(K, std::vector<double>(N + 1, inf));
  std::vector<std::vector<std::size_t>> from(K, std::vector<std::size_t>(N + 1, 0));
  for (std::size_t c = 0; c <= N; ++c) {
    if (allowed(c)) dp[0][c] = prefix[0][c];
  }
  for (std::size_t k = 1; k < K; ++k) {
    for (std::size_t c = 0; c <= N; ++c) {
      if (!allowed(c)) continue;
      for (std::size_t c0 = 0; c0 <= c; ++c0) {
        if (dp[k - 1][c0] == inf) continue;
        const double v = dp[k - 1][c0] + prefix[k][c] - prefix[k][c0];
        if (v < dp[k][c]) {
          dp[k][c] = v;
          from[k][c] = c0;
        }
      }
    }
  }

  std::vector<std::size_t> cuts(K + 1, 0);
  cuts[K] = N;
  for (std::size_t k = K - 1; k >= 1; --k) cuts[k] = from[k][cuts[k + 1]];

  std::vector<double> e(K + 1);
  e[0] = soc_min;
  e[K] = soc_max;
  for (std::size_t k = 1; k < K; ++k) {
    const std::size_t c = cuts[k];
    if (c == 0) {
      e[k] = soc_min;
    } else if (c == N) {
      e[k] = soc_max;
    } else {
      e[k] = 0.5 * (sorted[c - 1].soc + sorted[c].soc);
    }
    e[k] = std::clamp(e[k], soc_min, soc_max);
  }
  return e;
}

std::vector<cost::StageAction> action_set(const StorageAsset& asset, double s, double tau) {
  const SocBid& bid = asset.bid;
  const double eta = bid.efficiency;
  constexpr double kSame = 1e-12;
  std::vector<double> starts;
  for (double e : {s, asset.soc_min, asset.soc_max}) {
    if (std::none_of(starts.begin(), starts.end(), [&](double v) { return std::abs(v - e) <= kSame; })) {
      starts.push_back(e);
    }
  }
  std::vector<double> targets;
  for (double e : bid.breakpoints) {
    if (std::none_of(targets.begin(), targets.end(), [&](double v) { return std::abs(v - e) <= kSame; })) {
      targets.push_back(e);
    }
  }
  const double max_in = asset.charge_cap * tau;
  const double max_out = asset.discharge_cap * tau;
  std::vector<cost::StageAction> out;
  for (double start : starts) {
    for (double target : targets) {
      cost::StageAction a;
      a.start_soc = start;
      if (std::abs(target - start) <= kSame) {
        out.push_back(a);
      } else if (target > start) {
        a.charge = (target - start) / eta;
        if (a.charge <= max_in + 1e-12) out.push_back(a);
      } else {
        a.discharge = start - target;
        if (a.discharge <= max_out + 1e-12) out.push_back(a);
      }
    }
  }
  return out;
}

double true_action_cost(const SocBid& true_bid, const cost::StageAction& a) {
  double c = 0.0;
  double soc = a.start_soc;
  if (a.discharge > 0.0) {
    c += cost::discharge_leg_cost(true_bid, soc, a.discharge);
    soc -= a.discharge;
  }
  if (a.charge > 0.0) c -= cost::charge_leg_benefit(true_bid, soc, a.charge);
  return c;
}

BidGenResult generate(const SocBid& flat_bid, const MarginalCostSamples& samples,
                      const StorageAsset& asset, const TrueCostFn& true_cost, const BidGenOptions& opt) {
  if (flat_bid.segments() != 1 || flat_bid.breakpoints.size() != 2) {
    throw Error(ErrorCode::InvalidInput, "the reference bid must have a single segment");
  }
  if (opt.segments == 0) throw Error(ErrorCode::InvalidInput, "segments must be at least 1");
  if (samples.size() < opt.segments + 1) {
    throw Error(ErrorCode::InvalidInput, "at least K+1 samples are required");
  }
  for (const auto& s : samples) {
    if (s.soc < asset.soc_min - kSocTol || s.soc > asset.soc_max + kSocTol) {
      throw Error(ErrorCode::OutOfRange, "sample SoC outside the asset range");
    }
  }
  const PriceBounds bounds{flat_bid.charge_prices[0], flat_bid.discharge_prices[0]};
  const double eta = asset.efficiency();
  const double lo = asset.soc_min;
  const double hi = asset.soc_max;

  BidGenResult res;
  const std::vector<double> flat_e{lo, hi};
  const PriceFit flat = fit_price_step(flat_e, samples, bounds, eta, opt.spread_margin);
  res.bid = SocBid{flat_e, flat.charge_prices, flat.discharge_prices, eta};
  res.objective_trace.push_back(fit_error(res.bid, samples));

  if (opt.max_iters > 0) {
    std::vector<double> e = uniform_breakpoints(lo, hi, opt.segments);
    for (std::size_t it = 0; it < opt.max_iters; ++it) {
      const PriceFit pf = fit_price_step(e, samples, bounds, eta, opt.spread_margin);
      e = fit_breakpoint_step(pf.charge_prices, pf.discharge_prices, samples, lo, hi, eta);
      SocBid next{e, pf.charge_prices, pf.discharge_prices, eta};
      const double phi = fit_error(next, samples);
      const double prev = res.objective_trace.back();
      ++res.iterations;
      if (phi <= prev) {
        res.bid = std::move(next);
        res.objective_trace.push_back(phi);
      } else {
        res.objective_trace.push_back(prev);
      }
      if (prev - phi < opt.tol) break;
    }
  }

  res.cons_c2_report = cons_c2(res.bid, asset, opt.tau, true_cost, res.violations);

  if (opt.strict) {
    std::vector<PriceCut> cuts;
    for (std::size_t round = 0; round < opt.strict_rounds && res.violations > 0; ++round) {
      for (const ConsC2Entry& entry : res.cons_c2_report) {
        if (entry.slack >= -kViolationTol) continue;
        const std::size_t j = active_piece(res.bid, entry.action);
        cuts.push_back({piece_coeffs(res.bid, j, entry.action), entry.true_cost});
      }
      PriceFit pf;
      try {
        pf = fit_price_step(res.bid.breakpoints, samples, bounds, eta, opt.spread_margin, cuts);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::InfeasibleConstraints) throw;
        break;
      }
      res.bid.charge_prices = pf.charge_prices;
      res.bid.discharge_prices = pf.discharge_prices;
      res.cons_c2_report = cons_c2(res.bid, asset, opt.tau, true_cost, res.violations);
    }
  }
  return res;
}

MarginalCostSamples sample_bid(const SocBid& bid, std::size_t n) {
  MarginalCostSamples out;
  const double lo = bid.soc_min();
  const double hi = bid.soc_max();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const std::size_t k = segment_index(bid, s);
    out.push_back({s, bid.charge_prices[k], bid.discharge_prices[k]});
  }
  return out;
}

}  // namespace socmarket::bidgen
