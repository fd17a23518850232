#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "medtrade/instance.hpp"
#include "medtrade/mechanism.hpp"
#include "medtrade/oracle.hpp"
#include "medtrade/sim.hpp"
#include "medtrade/verify.hpp"

namespace medtrade {

// JSON codecs. Parsing throws input_error on malformed or out-of-schema
// documents. Doubles serialize with shortest round-trip precision, so
// parse -> serialize is a bit-exact fixed point (piecewise-linear densities
// normalize on first parse).

nlohmann::json to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Valuation& v);
Valuation valuation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& j);
ProblemInstance load_instance(const std::string& path);

nlohmann::json to_json(const ThresholdMechanism& mech);
ThresholdMechanism mechanism_from_json(const nlohmann::json& j);
ThresholdMechanism load_mechanism(const std::string& path);

nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const SimulationResult& result);

/// Fixed-width table rendering of a verification report.
std::string format_report_table(const VerificationReport& report);

// CSV emitters (17 significant digits).
std::string mechanism_csv(const ThresholdMechanism& mech);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::string buckets_csv(const std::vector<UtilityBucket>& buckets);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace medtrade
