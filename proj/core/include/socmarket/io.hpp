#pragma once

// JSON and CSV encodings of the library types. Field names follow the member
// names; units are those of the types.

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "socmarket/bidgen.hpp"
#include "socmarket/clearing.hpp"
#include "socmarket/model.hpp"
#include "socmarket/settlement.hpp"
#include "socmarket/sim.hpp"

namespace socmarket {

void to_json(nlohmann::json& j, const SocBid& v);
void from_json(const nlohmann::json& j, SocBid& v);
void to_json(nlohmann::json& j, const StorageAsset& v);
void from_json(const nlohmann::json& j, StorageAsset& v);
void to_json(nlohmann::json& j, const Generator& v);
void from_json(const nlohmann::json& j, Generator& v);
void to_json(nlohmann::json& j, const Network& v);
void from_json(const nlohmann::json& j, Network& v);
void to_json(nlohmann::json& j, const MarketInstance& v);
void from_json(const nlohmann::json& j, MarketInstance& v);
void to_json(nlohmann::json& j, const Trajectory& v);
void from_json(const nlohmann::json& j, Trajectory& v);
void to_json(nlohmann::json& j, const DispatchSolution& v);
void from_json(const nlohmann::json& j, DispatchSolution& v);
void to_json(nlohmann::json& j, const PriceSolution& v);
void from_json(const nlohmann::json& j, PriceSolution& v);
void to_json(nlohmann::json& j, const ProfitReport& v);

namespace cost {
void to_json(nlohmann::json& j, const StageAction& v);
void from_json(const nlohmann::json& j, StageAction& v);
}  // namespace cost

namespace bidgen {
void to_json(nlohmann::json& j, const BidGenResult& v);
}  // namespace bidgen

namespace sim {
void to_json(nlohmann::json& j, const ScenarioConfig& v);
void from_json(const nlohmann::json& j, ScenarioConfig& v);
void to_json(nlohmann::json& j, const RunMetrics& v);
void to_json(nlohmann::json& j, const MarketTemplate& v);
void from_json(const nlohmann::json& j, MarketTemplate& v);
}  // namespace sim

namespace io {

/// Parses a file; throws Error(InvalidInput) on I/O or syntax errors.
nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

/// Header "soc,charge_benefit,discharge_cost" then one sample per line.
bidgen::MarginalCostSamples read_samples_csv(std::istream& is);
bidgen::MarginalCostSamples read_samples_csv(const std::string& path);

/// Per-interval storage dispatch and prices.
void write_dispatch_csv(std::ostream& os, const MarketInstance& inst, const DispatchSolution& d,
                        const PriceSolution& p);
/// One row per scenario and variant.
void write_metrics_csv(std::ostream& os, const std::vector<sim::RunMetrics>& runs);

}  // namespace io
}  // namespace socmarket
