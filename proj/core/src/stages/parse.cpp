#include "signcurator/stages/parse.hpp"

#include "signcurator/error.hpp"

#include "../internal/json_util.hpp"

#include <algorithm>
#include <cctype>

namespace signcurator::stages {

using detail::ordered_json;

namespace {

constexpr const char* kNoTextSentinel = "No text found.";

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings != nullptr) {
    warnings->push_back(std::move(message));
  }
}

// Balanced-object slice starting at `open`, honoring strings and escapes.
// Returns empty when the braces never balance.
std::string object_slice(const std::string& raw, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) {
        return raw.substr(open, i - open + 1);
      }
    }
  }
  return "";
}

// First substring that parses as a JSON object, or nullopt.
std::optional<ordered_json> first_json_object(const std::string& raw) {
  std::size_t pos = 0;
  while ((pos = raw.find('{', pos)) != std::string::npos) {
    const std::string slice = object_slice(raw, pos);
    if (!slice.empty()) {
      ordered_json parsed =
          ordered_json::parse(slice, nullptr, /*allow_exceptions=*/false);
      if (!parsed.is_discarded() && parsed.is_object()) {
        return parsed;
      }
    }
    ++pos;
  }
  return std::nullopt;
}

FaceVerdict parse_face(const ordered_json& j,
                       std::vector<std::string>* warnings) {
  if (!j.contains("face_visible") || !j["face_visible"].is_boolean()) {
    throw ResponseFormatError("face reply lacks a boolean face_visible");
  }
  if (!j.contains("people_count") || !j["people_count"].is_number_integer()) {
    throw ResponseFormatError("face reply lacks an integer people_count");
  }
  FaceVerdict v;
  v.face_visible = j["face_visible"].get<bool>();
  v.people_count = j["people_count"].get<std::int64_t>();
  if (v.people_count < 0) {
    throw ResponseFormatError("face reply people_count is negative");
  }
  if (v.people_count == 0 && v.face_visible) {
    warn(warnings,
         "face reply claims a visible face with people_count 0; repaired to "
         "face_visible=false");
    v.face_visible = false;
  }
  return v;
}

ActivityVerdict parse_activity(const ordered_json& j) {
  if (!j.contains("is_signing") || !j["is_signing"].is_boolean()) {
    throw ResponseFormatError("activity reply lacks a boolean is_signing");
  }
  return ActivityVerdict{j["is_signing"].get<bool>()};
}

TextExtraction none_extraction() {
  return TextExtraction{std::nullopt, TextSource::None};
}

TextExtraction parse_text(const ordered_json& j,
                          std::vector<std::string>* warnings) {
  // Alternate reply shape: explicit formal_caption / embedded_text keys.
  // A nonempty formal caption wins over embedded text.
  const auto string_field =
      [&j](const char* key) -> std::optional<std::string> {
    if (j.contains(key) && j[key].is_string()) {
      return j[key].get<std::string>();
    }
    return std::nullopt;
  };
  if (const auto formal = string_field("formal_caption")) {
    const std::string text = trim(*formal);
    if (!text.empty()) {
      return TextExtraction{text, TextSource::FormalCaption};
    }
  }
  if (const auto embedded = string_field("embedded_text")) {
    const std::string text = trim(*embedded);
    if (!text.empty()) {
      return TextExtraction{text, TextSource::EmbeddedText};
    }
  }
  if (j.contains("formal_caption") || j.contains("embedded_text")) {
    return none_extraction();  // keys present but nothing usable in them
  }
  if (!j.contains("text")) {
    throw ResponseFormatError("text reply lacks a text field");
  }
  if (j["text"].is_null()) {
    return none_extraction();
  }
  if (!j["text"].is_string()) {
    throw ResponseFormatError("text reply text field must be a string");
  }
  const std::string text = trim(j["text"].get<std::string>());
  if (text.empty()) {
    return none_extraction();
  }
  TextSource source = TextSource::EmbeddedText;
  if (j.contains("source") && j["source"].is_string()) {
    const std::string s = j["source"].get<std::string>();
    if (s == "FormalCaption" || s == "formal_caption") {
      source = TextSource::FormalCaption;
    } else if (s == "EmbeddedText" || s == "embedded_text") {
      source = TextSource::EmbeddedText;
    } else if (s == "None" || s == "none") {
      warn(warnings,
           "text reply pairs source None with nonempty text; kept the text "
           "as embedded");
    } else {
      throw ResponseFormatError("text reply has unknown source '" + s + "'");
    }
  } else {
    warn(warnings, "text reply omits source; assuming embedded text");
  }
  return TextExtraction{text, source};
}

JudgeVerdict parse_judge(const ordered_json& j) {
  if (!j.contains("aligned") || !j["aligned"].is_boolean()) {
    throw ResponseFormatError("judge reply lacks a boolean aligned");
  }
  JudgeVerdict v;
  v.aligned = j["aligned"].get<bool>();
  if (j.contains("rationale") && j["rationale"].is_string()) {
    v.rationale = j["rationale"].get<std::string>();
  }
  return v;
}

}  // namespace

VerdictOutcome parse_verdict(const std::string& raw, Stage stage,
                             std::vector<std::string>* warnings) {
  const auto object = first_json_object(raw);
  if (!object) {
    if (stage == Stage::Text && raw.find(kNoTextSentinel) != std::string::npos) {
      return none_extraction();
    }
    throw ResponseFormatError("reply contains no JSON object" +
                              std::string(stage == Stage::Text
                                              ? " and no \"No text found.\" "
                                                "sentence"
                                              : ""));
  }
  switch (stage) {
    case Stage::Face: return parse_face(*object, warnings);
    case Stage::Activity: return parse_activity(*object);
    case Stage::Text: return parse_text(*object, warnings);
    case Stage::Judge: return parse_judge(*object);
  }
  throw Error("unhandled stage value");
}

}  // namespace signcurator::stages
