#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace relaxplan {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Canonical symbol form: lowercase, trimmed, runs of whitespace and
/// hyphens collapsed to a single underscore. Used whenever a plan or
/// goal symbol is matched against a scene identifier.
inline std::string normalize_symbol(std::string_view s) {
  std::string t = trim(s);
  std::string out;
  out.reserve(t.size());
  bool in_sep = false;
  for (char raw : t) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c) || raw == '-') {
      in_sep = true;
      continue;
    }
    if (in_sep && !out.empty()) out.push_back('_');
    in_sep = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

/// Label part of a scene identifier: "mop_1" -> "mop", "tv_screen_12" ->
/// "tv_screen". Identifiers without a numeric suffix are returned whole.
inline std::string label_of_id(std::string_view id) {
  size_t us = id.rfind('_');
  if (us == std::string_view::npos || us + 1 == id.size()) return std::string(id);
  for (size_t i = us + 1; i < id.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return std::string(id);
  }
  return std::string(id.substr(0, us));
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// Levenshtein distance, used to rank grounding suggestions.
inline int edit_distance(std::string_view a, std::string_view b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// FNV-1a over a string mixed with a caller seed. Task scatter seeds are
/// derived this way so per-task randomness is independent of batch order.
inline uint64_t mix_seed(uint64_t seed, std::string_view key) {
  uint64_t h = 1469598103934665603ull ^ (seed * 0x9e3779b97f4a7c15ull);
  for (char c : key) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace relaxplan
