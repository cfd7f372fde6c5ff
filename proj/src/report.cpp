#include "cmgkit/report.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

namespace cmg {

bool RunReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"value", c.value},
                           {"tolerance", c.tolerance},
                           {"detail", c.detail}});
  }
  return {{"schema", kReportSchema}, {"version", kVersion},
          {"command", command},      {"inputs", inputs},
          {"results", results},      {"checks", checks_json},
          {"pass", pass()}};
}

std::filesystem::path report_directory(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CMGKIT_REPORT_DIR"); env && *env) return env;
  return ".";
}

std::filesystem::path write_report(const RunReport& report,
                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (report.command + "_report.json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file " + path.string());
  out << report.to_json().dump(2) << "\n";
  return path;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::filesystem::path write_csv(const std::filesystem::path& path,
                                const std::vector<std::string>& header,
                                const std::vector<std::vector<double>>& rows) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV file " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  return path;
}

}  // namespace cmg
