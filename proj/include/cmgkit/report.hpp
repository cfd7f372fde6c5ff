#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmgkit/version.hpp"

namespace cmg {

// One tolerance-judged claim inside a report.
struct ReportCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Machine-readable run report. Wall time is printed to the console but kept
// out of the serialized payload so repeated runs with the same configuration
// produce byte-identical files.
struct RunReport {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<ReportCheck> checks;

  bool pass() const;
  nlohmann::json to_json() const;
};

// Resolves the report directory: explicit flag value, else the
// CMGKIT_REPORT_DIR environment variable, else the current directory.
std::filesystem::path report_directory(const std::string& flag_value);

std::filesystem::path write_report(const RunReport& report,
                                   const std::filesystem::path& dir);

// Fixed-column CSV writer; doubles are rendered with shortest round-trip
// formatting so files are reproducible.
std::filesystem::path write_csv(const std::filesystem::path& path,
                                const std::vector<std::string>& header,
                                const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace cmg
