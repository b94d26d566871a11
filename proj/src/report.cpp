#include "edbench/report.h"

#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include <nlohmann/json.hpp>

#include "edbench/errors.h"
#include "edbench/format.h"

namespace edbench {

namespace {

constexpr int kCsvDecimals = 6;
constexpr int kMarkdownDecimals = 2;

std::string fixed(double v, int decimals) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using CellKey = std::tuple<double, std::string, Strategy>;

std::map<CellKey, const ScenarioResult*> index_results(const BenchmarkReport& report) {
  std::map<CellKey, const ScenarioResult*> out;
  for (const auto& r : report.results) out[{r.pd, r.model, r.strategy}] = &r;
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string error_table_csv(const BenchmarkReport& report, Strategy strategy) {
  const auto index = index_results(report);
  std::string out = "load_demand_mw";
  for (const auto& m : report.models) out += "," + csv_field(m);
  out += '\n';
  for (double pd : report.eval_pds) {
    out += format_number(pd, kCsvDecimals);
    for (const auto& m : report.models) {
      const auto it = index.find({pd, m, strategy});
      out += ',';
      if (it == index.end()) continue;  // cell not run for this strategy
      out += it->second->parse_ok ? fixed(it->second->rel_error_pct, kCsvDecimals) : "NA";
    }
    out += '\n';
  }
  return out;
}

std::string error_table_markdown(const BenchmarkReport& report, Strategy strategy) {
  const auto index = index_results(report);
  std::string out = "Generation cost relative error (%), " + std::string(to_string(strategy)) +
                    " prompt\n\n| Load Demand |";
  for (const auto& m : report.models) out += " " + m + " |";
  out += "\n|---|";
  for (std::size_t k = 0; k < report.models.size(); ++k) out += "---|";
  out += '\n';
  for (double pd : report.eval_pds) {
    out += "| " + format_number(pd) + " |";
    for (const auto& m : report.models) {
      const auto it = index.find({pd, m, strategy});
      std::string cell = "-";
      if (it != index.end()) {
        cell = it->second->parse_ok ? fixed(it->second->rel_error_pct, kMarkdownDecimals) : "fail";
      }
      out += " " + cell + " |";
    }
    out += '\n';
  }
  return out;
}

std::string violations_csv(const BenchmarkReport& report) {
  std::string out =
      "model,strategy,cells,scored,failed,mean_gen_violation_mw,mean_balance_violation_mw,"
      "mean_rel_error_pct\n";
  std::map<std::pair<std::string, Strategy>, const CellSummary*> by_key;
  for (const auto& s : report.summaries) by_key[{s.model, s.strategy}] = &s;
  for (const auto& m : report.models) {
    for (Strategy st : {Strategy::kNonEvolutionary, Strategy::kEvolutionary}) {
      const auto it = by_key.find({m, st});
      if (it == by_key.end()) continue;
      const CellSummary& s = *it->second;
      auto mean = [&](double v) { return s.scored > 0 ? fixed(v, kCsvDecimals) : std::string("NA"); };
      out += csv_field(s.model) + "," + std::string(to_string(s.strategy)) + "," +
             std::to_string(s.cells) + "," + std::to_string(s.scored) + "," +
             std::to_string(s.failed) + "," + mean(s.mean_gen_violation) + "," +
             mean(s.mean_balance_violation) + "," + mean(s.mean_rel_error_pct) + "\n";
    }
  }
  return out;
}

std::string dispatch_series_csv(const BenchmarkReport& report) {
  const auto index = index_results(report);
  std::string out = "pd,series,strategy";
  for (int bus : report.bus_ids) out += ",bus_" + std::to_string(bus);
  out += '\n';
  auto row = [&](double pd, const std::string& series, std::string_view strategy,
                 const std::vector<double>& pg) {
    out += format_number(pd, kCsvDecimals) + "," + csv_field(series) + "," + std::string(strategy);
    for (double p : pg) out += "," + fixed(p, kCsvDecimals);
    out += '\n';
  };
  for (std::size_t p = 0; p < report.eval_pds.size(); ++p) {
    const double pd = report.eval_pds[p];
    if (p < report.exact.size()) row(pd, "exact", "exact", report.exact[p].dispatch.pg);
    for (const auto& m : report.models) {
      for (Strategy st : report.strategies) {
        const auto it = index.find({pd, m, st});
        if (it != index.end() && it->second->parse_ok) {
          row(pd, m, to_string(st), *it->second->parsed.pg);
        }
      }
    }
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const BenchmarkReport& report,
                                               const std::filesystem::path& out_dir,
                                               ReportFormat format,
                                               const nlohmann::json* manifest) {
  if (report.results.empty()) throw ValidationError("report has no results");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const auto path = out_dir / name;
    write_file(path, content);
    written.push_back(path);
  };

  const bool csv = format != ReportFormat::kMarkdown;
  const bool md = format != ReportFormat::kCsv;
  for (Strategy s : report.strategies) {
    const std::string stem = "report_" + std::string(to_string(s));
    if (csv) emit(stem + ".csv", error_table_csv(report, s));
    if (md) emit(stem + ".md", error_table_markdown(report, s));
  }
  emit("violations.csv", violations_csv(report));
  emit("dispatch_series.csv", dispatch_series_csv(report));
  if (manifest != nullptr) emit("run_manifest.json", manifest->dump(2) + "\n");
  return written;
}

}  // namespace edbench
