#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "trifuse/errors.hpp"

namespace trifuse::detail {

/// Round-trippable, deterministic double rendering for all emitted files.
inline std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

inline double parse_double(const std::string& text, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw DataError(context + ": malformed number '" + text + "'");
  }
  return value;
}

inline long long parse_int(const std::string& text, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw DataError(context + ": malformed integer '" + text + "'");
  }
  return value;
}

inline unsigned long long parse_uint(const std::string& text,
                                     const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE ||
      text.find('-') != std::string::npos) {
    throw DataError(context + ": malformed unsigned integer '" + text + "'");
  }
  return value;
}

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

struct KeyValueLine {
  std::string key;
  std::string value;
  int line_number = 0;
};

/// Flat `key = value` text with '#' comments and blank lines. Shared by the
/// dataset manifest and the pipeline configuration files.
inline std::vector<KeyValueLine> read_key_value_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<KeyValueLine> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw DataError(path.string() + " line " + std::to_string(line_number) +
                      ": expected 'key = value'");
    }
    KeyValueLine entry;
    entry.key = trim(text.substr(0, eq));
    entry.value = trim(text.substr(eq + 1));
    entry.line_number = line_number;
    if (entry.key.empty()) {
      throw DataError(path.string() + " line " + std::to_string(line_number) +
                      ": empty key");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

/// Splits on runs of spaces/tabs.
inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

/// Splits on single tabs, keeping empty fields (results records carry
/// free-text columns that may contain spaces).
inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace trifuse::detail
