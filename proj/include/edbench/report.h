#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "edbench/benchmark.h"

namespace edbench {

enum class ReportFormat { kCsv, kMarkdown, kAll };

// Relative-error table for one strategy: one row per evaluation demand (in
// run order), one column per model. Failed cells read "NA" (CSV) or "fail"
// (Markdown).
std::string error_table_csv(const BenchmarkReport& report, Strategy strategy);
std::string error_table_markdown(const BenchmarkReport& report, Strategy strategy);

// Per (model, strategy): cell counts and mean violations / error over scored cells.
std::string violations_csv(const BenchmarkReport& report);

// Wide per-unit series for plotting: the exact dispatch at every demand, then
// each scored model response.
std::string dispatch_series_csv(const BenchmarkReport& report);

// Writes report_<strategy>.csv / .md, violations.csv and dispatch_series.csv
// under `out_dir` (created if needed), plus run_manifest.json when `manifest`
// is not null. Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> emit_report(const BenchmarkReport& report,
                                               const std::filesystem::path& out_dir,
                                               ReportFormat format,
                                               const nlohmann::json* manifest = nullptr);

}  // namespace edbench
