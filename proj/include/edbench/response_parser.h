#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edbench/power_system.h"

namespace edbench {

struct ParsedResponse {
  std::optional<std::vector<double>> pg;  // length n_units when present
  std::optional<double> claimed_cost;     // informational only, never scored
  std::vector<std::string> diagnostics;

  bool ok() const { return pg.has_value(); }
  std::optional<Dispatch> dispatch(double pd) const;
};

// Pulls the last bracketed numeric vector of length `n_units` out of free-form
// model output, plus the last number labelled "cost". Code fences, LaTeX
// spacing commands and thousands separators are stripped first.
//
// Inside a vector, a comma counts as a thousands separator only when the
// vector otherwise separates elements with comma + whitespace and the comma
// sits between a digit and exactly three digits ("[1,182.5, 653]" has two
// elements; "[50,100,20]" has three).
//
// Never throws; failures come back with !ok() and diagnostics listing every
// vector length seen.
ParsedResponse parse_response(std::string_view raw, std::size_t n_units);

}  // namespace edbench
