#pragma once

// Domain types for the co-optimized energy / regulation market with
// SoC-dependent storage bids. Units: SoC in MWh, power in MW, prices in $/MWh,
// interval lengths in hours.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace socmarket {

inline constexpr double kDefaultEdcrTol = 1e-9;
inline constexpr double kDefaultSpreadMargin = 1e-9;
// Slack allowed when a SoC value produced by a solver is compared to a bound.
inline constexpr double kSocTol = 1e-7;

/// Piecewise-constant SoC-dependent bid.
///
/// Segment k covers [breakpoints[k], breakpoints[k+1]) (the last segment is
/// closed). charge_prices[k] is the marginal charging benefit and
/// discharge_prices[k] the marginal discharging cost while the SoC sits in
/// segment k. Efficiency applies to the charge side only.
struct SocBid {
  std::vector<double> breakpoints;
  std::vector<double> charge_prices;
  std::vector<double> discharge_prices;
  double efficiency = 1.0;

  std::size_t segments() const noexcept { return charge_prices.size(); }
  double soc_min() const { return breakpoints.front(); }
  double soc_max() const { return breakpoints.back(); }

  /// SoC-independent bid: one segment over [soc_min, soc_max].
  static SocBid flat(double soc_min, double soc_max, double charge_price,
                     double discharge_price, double efficiency);

  /// Multiplies both price vectors by `factor` (the bid scale factor).
  SocBid scaled(double factor) const;

  bool operator==(const SocBid&) const = default;
};

enum class BidViolation {
  None,
  Malformed,
  Monotonicity,
  Spread,
  Breakpoint,
};

struct BidValidation {
  BidViolation violation = BidViolation::None;
  std::string message;

  bool ok() const noexcept { return violation == BidViolation::None; }
};

/// Checks shape, breakpoint ordering, price monotonicity and the
/// charge/discharge spread c^c_1 / eta + margin <= c^d_K.
BidValidation validate_bid(const SocBid& bid,
                           double spread_margin = kDefaultSpreadMargin);

/// Throws Error with the matching code when validate_bid fails.
void require_valid_bid(const SocBid& bid,
                       double spread_margin = kDefaultSpreadMargin);

/// Equal decremental-cost ratio, in difference form:
/// |(c^c_k - c^c_{k+1}) - eta (c^d_k - c^d_{k+1})| <= tol for every k.
bool is_edcr(const SocBid& bid, double tol = kDefaultEdcrTol);

/// Zero-based index of the segment holding `soc`. Zero-width segments are
/// skipped; the top breakpoint belongs to the last non-empty segment.
/// Throws OutOfRange when soc is outside [E_1 - tol, E_{K+1} + tol].
std::size_t segment_index(const SocBid& bid, double soc, double tol = kSocTol);

struct StorageAsset {
  SocBid bid;
  double soc_min = 0.0;
  double soc_max = 0.0;
  double charge_cap = 0.0;
  double discharge_cap = 0.0;
  double regdown_cap = 0.0;
  double regup_cap = 0.0;
  double initial_soc = 0.0;
  // Expected utilized fraction of cleared regulation, one entry per interval.
  // A single entry is broadcast to every interval.
  std::vector<double> dispatch_fraction_up{1.0};
  std::vector<double> dispatch_fraction_down{1.0};
  std::size_t bus = 0;

  double gamma_up(std::size_t t) const;
  double gamma_down(std::size_t t) const;
  double efficiency() const noexcept { return bid.efficiency; }
};

/// Throws InvalidInput / BreakpointViolation on a malformed asset. `horizon`
/// is used to check the per-interval dispatch fractions (0 skips the check).
void validate_asset(const StorageAsset& asset, std::size_t horizon = 0);

struct Generator {
  double energy_price = 0.0;
  double regup_price = 0.0;
  double regdown_price = 0.0;
  double output_max = 0.0;
  double output_min = 0.0;
  std::optional<double> regup_capacity_max;
  std::optional<double> regdown_capacity_max;
  std::size_t bus = 0;
  // Optional per-interval override of output_max (e.g. solar availability).
  std::vector<double> output_max_profile;

  double output_max_at(std::size_t t) const {
    return output_max_profile.empty() ? output_max : output_max_profile.at(t);
  }
};

void validate_generator(const Generator& gen);

/// DC network through a shift-factor matrix with 2B rows (both flow
/// directions) and bus_count columns. A single-bus system has no rows.
struct Network {
  std::size_t bus_count = 1;
  std::vector<std::vector<double>> shift_factors;
  std::vector<double> line_limits;

  std::size_t line_rows() const noexcept { return line_limits.size(); }
  static Network single_bus() { return Network{}; }
};

void validate_network(const Network& net);

struct MarketInstance {
  std::size_t horizon = 1;
  double interval_length = 1.0;
  std::vector<std::vector<double>> demand;  // [t][bus], MW
  std::vector<double> regup_requirement;    // [t], MW
  std::vector<double> regdown_requirement;  // [t], MW
  std::vector<Generator> generators;
  std::vector<StorageAsset> storages;
  Network network;
};

/// Throws DimensionMismatch or InvalidInput when the instance is malformed.
void validate_instance(const MarketInstance& inst);

/// Intra-interval regulation mileage and fine-grained SoC path.
struct Trajectory {
  double sub_interval_length = 0.0;
  std::vector<double> mileage_up;    // MW, one entry per sub-interval
  std::vector<double> mileage_down;  // MW
  std::vector<double> fine_soc;      // MWh, sub_count + 1 entries

  std::size_t sub_count() const noexcept { return mileage_up.size(); }
};

}  // namespace socmarket
