#include "edbench/power_system.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "edbench/errors.h"
#include "edbench/format.h"

namespace edbench {

namespace {

constexpr std::array<std::string_view, 6> kColumns = {"bus", "p_min", "p_max",
                                                      "a",   "b",     "c"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t row,
                    std::string_view column) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw SystemFileError(row, std::string(column),
                          "not a number: '" + std::string(field) + "'");
  }
  return value;
}

int parse_bus(std::string_view field, std::size_t row) {
  int value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw SystemFileError(row, "bus",
                          "not an integer: '" + std::string(field) + "'");
  }
  return value;
}

// Row-level checks so that loader errors name the offending row; the
// PowerSystem constructor repeats them for programmatic construction.
void validate_row(const GeneratorUnit& u, std::size_t row) {
  if (u.p_min < 0.0) throw SystemFileError(row, "p_min", "must be >= 0");
  if (u.p_min > u.p_max) {
    throw SystemFileError(row, "p_min",
                          "p_min " + format_number(u.p_min) + " exceeds p_max " +
                              format_number(u.p_max));
  }
  if (u.a < 0.0) throw SystemFileError(row, "a", "must be >= 0");
}

}  // namespace

PowerSystem::PowerSystem(std::vector<GeneratorUnit> units)
    : units_(std::move(units)) {
  if (units_.empty()) throw ValidationError("power system has no units");
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const auto& u = units_[i];
    const std::string where = "unit " + std::to_string(i) + " (bus " +
                              std::to_string(u.bus_id) + "): ";
    for (double v : {u.p_min, u.p_max, u.a, u.b, u.c}) {
      if (!std::isfinite(v)) throw ValidationError(where + "non-finite field");
    }
    if (u.p_min < 0.0) throw ValidationError(where + "p_min < 0");
    if (u.p_min > u.p_max) throw ValidationError(where + "p_min > p_max");
    if (u.a < 0.0) throw ValidationError(where + "a < 0");
    pd_min_ += u.p_min;
    pd_max_ += u.p_max;
    constant_cost_ += u.c;
  }
}

std::vector<double> PowerSystem::p_min_vector() const {
  std::vector<double> out;
  out.reserve(units_.size());
  for (const auto& u : units_) out.push_back(u.p_min);
  return out;
}

std::vector<double> PowerSystem::p_max_vector() const {
  std::vector<double> out;
  out.reserve(units_.size());
  for (const auto& u : units_) out.push_back(u.p_max);
  return out;
}

void PowerSystem::require_feasible(double pd) const {
  if (!std::isfinite(pd) || pd < pd_min_) {
    throw InfeasibleError(pd, pd_min_, InfeasibleError::Side::kBelowMin);
  }
  if (pd > pd_max_) {
    throw InfeasibleError(pd, pd_max_, InfeasibleError::Side::kAboveMax);
  }
}

InfeasibleError::InfeasibleError(double pd, double bound, Side side)
    : DomainError("demand " + format_number(pd) + " MW is " +
                  (side == Side::kBelowMin ? "below pd_min = " : "above pd_max = ") +
                  format_number(bound) + " MW"),
      pd_(pd),
      bound_(bound),
      side_(side) {}

double Dispatch::total() const {
  double sum = 0.0;
  for (double p : pg) sum += p;
  return sum;
}

void check_dispatch(const Dispatch& d, const PowerSystem& sys) {
  if (d.pg.size() != sys.size()) throw DimensionError(sys.size(), d.pg.size());
  for (double p : d.pg) {
    if (!std::isfinite(p)) throw ValidationError("dispatch has a non-finite entry");
  }
  if (!std::isfinite(d.pd)) throw ValidationError("dispatch demand is not finite");
}

PowerSystem parse_system_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<GeneratorUnit> units;
  bool header_seen = false;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;

    const auto fields = split_commas(line);
    if (!header_seen) {
      if (fields.size() != kColumns.size() ||
          !std::equal(fields.begin(), fields.end(), kColumns.begin())) {
        throw SystemFileError(0, "", "expected header 'bus,p_min,p_max,a,b,c'");
      }
      header_seen = true;
      continue;
    }
    ++row;
    if (fields.size() != kColumns.size()) {
      throw SystemFileError(row, "",
                            "expected 6 fields, found " + std::to_string(fields.size()));
    }
    GeneratorUnit u;
    u.bus_id = parse_bus(fields[0], row);
    u.p_min = parse_number(fields[1], row, kColumns[1]);
    u.p_max = parse_number(fields[2], row, kColumns[2]);
    u.a = parse_number(fields[3], row, kColumns[3]);
    u.b = parse_number(fields[4], row, kColumns[4]);
    u.c = parse_number(fields[5], row, kColumns[5]);
    validate_row(u, row);
    units.push_back(u);
  }
  if (!header_seen) throw SystemFileError(0, "", "empty system file");
  if (units.empty()) throw SystemFileError(0, "", "no unit rows");
  return PowerSystem(std::move(units));
}

PowerSystem parse_system_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SystemFileError(0, "", std::string("invalid JSON: ") + e.what());
  }
  const nlohmann::json* rows = &doc;
  if (doc.is_object()) {
    if (!doc.contains("units")) throw SystemFileError(0, "units", "missing");
    rows = &doc["units"];
  }
  if (!rows->is_array() || rows->empty()) {
    throw SystemFileError(0, "units", "expected a nonempty array");
  }

  std::vector<GeneratorUnit> units;
  std::size_t row = 0;
  for (const auto& item : *rows) {
    ++row;
    if (!item.is_object()) throw SystemFileError(row, "", "expected an object");
    auto number = [&](std::string_view key) {
      const auto it = item.find(key);
      if (it == item.end()) throw SystemFileError(row, std::string(key), "missing");
      if (!it->is_number()) throw SystemFileError(row, std::string(key), "not a number");
      const double v = it->get<double>();
      if (!std::isfinite(v)) throw SystemFileError(row, std::string(key), "not finite");
      return v;
    };
    GeneratorUnit u;
    const auto bus = item.find("bus");
    if (bus == item.end() || !bus->is_number_integer()) {
      throw SystemFileError(row, "bus", "expected an integer");
    }
    u.bus_id = bus->get<int>();
    u.p_min = number("p_min");
    u.p_max = number("p_max");
    u.a = number("a");
    u.b = number("b");
    u.c = number("c");
    validate_row(u, row);
    units.push_back(u);
  }
  return PowerSystem(std::move(units));
}

PowerSystem load_system(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    return parse_system_json(text);
  }
  return parse_system_csv(text);
}

PowerSystem load_system_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open system file " + path.string());
  return load_system(in);
}

double total_cost(const Dispatch& d, const PowerSystem& sys, Constants constants) {
  check_dispatch(d, sys);
  double sum = 0.0;
  const auto units = sys.units();
  for (std::size_t i = 0; i < units.size(); ++i) sum += units[i].cost(d.pg[i]);
  if (constants == Constants::kInclude) sum += sys.constant_cost();
  return sum;
}

Violations violations(const Dispatch& d, const PowerSystem& sys) {
  check_dispatch(d, sys);
  Violations v;
  const auto units = sys.units();
  for (std::size_t i = 0; i < units.size(); ++i) {
    v.generation += std::max(0.0, units[i].p_min - d.pg[i]) +
                    std::max(0.0, d.pg[i] - units[i].p_max);
  }
  v.balance = std::abs(d.total() - d.pd);
  return v;
}

}  // namespace edbench
