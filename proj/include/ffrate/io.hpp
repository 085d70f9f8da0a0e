#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffrate/decay_fit.hpp"
#include "ffrate/materials.hpp"
#include "ffrate/mc_oracle.hpp"
#include "ffrate/rate_engine.hpp"

// CSV and JSON encodings of engine results. Numbers use the shortest
// representation that round-trips; unbounded lifetimes are written as null.
namespace ffrate::io {

std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

nlohmann::json optional_json(const std::optional<double>& value);

nlohmann::json to_json(const RateResult& result);
nlohmann::json to_json(const Material& material);
nlohmann::json to_json(const oracle::OracleReport& report);
nlohmann::json to_json(const oracle::PlacementSummary& summary);
nlohmann::json to_json(const decay::FitResult& fit);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows, SweepPlane plane, bool band);
nlohmann::json map_json(const LifetimeMap& map);
nlohmann::json scan_json(const std::vector<ScanRow>& rows, bool band);

void write_rate_csv(std::ostream& out, const RateResult& result);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool band);
void write_map_csv(std::ostream& out, const LifetimeMap& map);
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows, bool band);

/// One header row of keys and one row of values for a flat JSON object.
/// Nested arrays are joined with ';'.
void write_record_csv(std::ostream& out, const nlohmann::json& record);

}  // namespace ffrate::io
