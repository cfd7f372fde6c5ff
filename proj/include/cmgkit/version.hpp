#pragma once

namespace cmg {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "cmgkit.report.v1";

}  // namespace cmg
