#pragma once

#include "signcurator/error.hpp"

#include <json.hpp>

#include <string>
#include <utility>

namespace signcurator::detail {

using ordered_json = nlohmann::ordered_json;

// 1-based line/column of a 1-based byte offset, for parse diagnostics.
inline std::pair<std::size_t, std::size_t> offset_to_line_col(
    const std::string& text, std::size_t byte_1based) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t limit =
      byte_1based == 0 ? 0 : std::min(byte_1based - 1, text.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Parses JSON, translating syntax failures to ParseError with line/column.
inline ordered_json parse_json(const std::string& text,
                               const std::string& what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = offset_to_line_col(text, e.byte);
    throw ParseError("malformed " + what + ": " + e.what(), line, col);
  }
}

// Field access that reports document-shape violations as ParseError.
inline const ordered_json& require_field(const ordered_json& obj,
                                         const char* key,
                                         const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError("missing field '" + std::string(key) + "' in " + context);
  }
  return obj.at(key);
}

inline std::string require_string(const ordered_json& obj, const char* key,
                                  const std::string& context) {
  const auto& v = require_field(obj, key, context);
  if (!v.is_string()) {
    throw ParseError("field '" + std::string(key) + "' in " + context +
                     " must be a string");
  }
  return v.get<std::string>();
}

inline double require_number(const ordered_json& obj, const char* key,
                             const std::string& context) {
  const auto& v = require_field(obj, key, context);
  if (!v.is_number()) {
    throw ParseError("field '" + std::string(key) + "' in " + context +
                     " must be a number");
  }
  return v.get<double>();
}

inline bool require_bool(const ordered_json& obj, const char* key,
                         const std::string& context) {
  const auto& v = require_field(obj, key, context);
  if (!v.is_boolean()) {
    throw ParseError("field '" + std::string(key) + "' in " + context +
                     " must be a boolean");
  }
  return v.get<bool>();
}

}  // namespace signcurator::detail
