#include "edbench/response_parser.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

#include "edbench/format.h"

namespace edbench {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Drops fence markers (``` lines keep their content) and LaTeX spacing so
// that "PG = [50,\;10]" and fenced blocks parse like plain text.
std::string normalize(std::string_view raw) {
  std::string text(raw);
  replace_all(text, "\r\n", "\n");
  replace_all(text, "```", "\n");
  replace_all(text, "\\left", "");
  replace_all(text, "\\right", "");
  for (std::string_view cmd : {"\\[", "\\]", "\\quad", "\\;", "\\,", "\\!", "\\ "}) {
    replace_all(text, cmd, " ");
  }
  return text;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_element(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2) {
    const auto tail = s.substr(s.size() - 2);
    if ((tail[0] == 'M' || tail[0] == 'm') && (tail[1] == 'W' || tail[1] == 'w')) {
      s = trim(s.substr(0, s.size() - 2));
    }
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string strip_thousands(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == ',' && i > 0 && is_digit(body[i - 1]) && i + 3 < body.size() &&
        is_digit(body[i + 1]) && is_digit(body[i + 2]) && is_digit(body[i + 3]) &&
        (i + 4 >= body.size() || !is_digit(body[i + 4]))) {
      continue;
    }
    out += c;
  }
  return out;
}

std::optional<std::vector<double>> parse_vector(std::string_view body) {
  std::string content(body);
  const bool has_comma = content.find(',') != std::string::npos;
  bool spaced = false;
  for (std::size_t i = 0; i + 1 < content.size(); ++i) {
    if (content[i] == ',' && is_space(content[i + 1])) spaced = true;
  }
  if (spaced) content = strip_thousands(content);

  std::vector<std::string_view> parts;
  std::string_view view(content);
  if (has_comma) {
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      parts.push_back(view.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < view.size()) {
      while (i < view.size() && is_space(view[i])) ++i;
      std::size_t j = i;
      while (j < view.size() && !is_space(view[j])) ++j;
      if (j > i) parts.push_back(view.substr(i, j - i));
      i = j;
    }
  }
  if (parts.empty() || trim(view).empty()) return std::nullopt;

  std::vector<double> out;
  out.reserve(parts.size());
  for (auto p : parts) {
    auto v = parse_element(p);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

std::optional<double> last_claimed_cost(const std::string& text) {
  static const std::regex kCost(
      R"(cost[^0-9\n]{0,40}?(\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?))",
      std::regex::icase | std::regex::ECMAScript);
  std::optional<double> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kCost);
       it != std::sregex_iterator(); ++it) {
    std::string digits = (*it)[1].str();
    std::erase(digits, ',');
    if (auto v = parse_element(digits)) found = v;
  }
  return found;
}

}  // namespace

std::optional<Dispatch> ParsedResponse::dispatch(double pd) const {
  if (!pg) return std::nullopt;
  return Dispatch{*pg, pd};
}

ParsedResponse parse_response(std::string_view raw, std::size_t n_units) {
  ParsedResponse out;
  if (trim(raw).empty()) {
    out.diagnostics.push_back("empty response");
    return out;
  }

  const std::string text = normalize(raw);
  std::vector<std::size_t> lengths;
  std::size_t open = std::string::npos;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '[') {
      open = i;
    } else if (text[i] == ']' && open != std::string::npos) {
      auto vec = parse_vector(std::string_view(text).substr(open + 1, i - open - 1));
      open = std::string::npos;
      if (!vec) continue;
      lengths.push_back(vec->size());
      if (vec->size() == n_units) out.pg = std::move(*vec);
    }
  }

  std::string seen = "vector lengths seen: [";
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    if (k > 0) seen += ", ";
    seen += std::to_string(lengths[k]);
  }
  seen += ']';
  if (lengths.empty()) out.diagnostics.push_back("no bracketed numeric vector found");
  out.diagnostics.push_back(seen);
  if (!out.pg) {
    out.diagnostics.push_back("no vector of length " + std::to_string(n_units));
  }

  out.claimed_cost = last_claimed_cost(text);
  out.diagnostics.push_back(out.claimed_cost
                                ? "claimed cost: " + format_roundtrip(*out.claimed_cost)
                                : std::string("no cost claim found"));
  return out;
}

}  // namespace edbench
