#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sfde/config.hpp"
#include "sfde/montecarlo.hpp"
#include "sfde/solver.hpp"

namespace sfde {

inline constexpr const char* kToolVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

ordered_json config_to_json(const ConfigMap& config);
ordered_json study_result_to_json(const StudyResult& result);
std::string study_result_to_csv(const StudyResult& result);
ordered_json moment_estimate_to_json(const MomentEstimate& est);
ordered_json modulus_estimate_to_json(const ModulusEstimate& est);
ordered_json gronwall_report_to_json(const GronwallCheckReport& report);
ordered_json validation_report_to_json(const ValidationReport& report);

std::string trajectory_to_csv(const Trajectory& trajectory);

// Writes via a temp file and an atomic rename; no partial outputs remain on
// failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sfde
