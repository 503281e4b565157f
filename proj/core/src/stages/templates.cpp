#include "signcurator/stages/templates.hpp"

#include "signcurator/common/fs.hpp"
#include "signcurator/common/hash.hpp"
#include "signcurator/error.hpp"

#include "../internal/json_util.hpp"

#include <algorithm>
#include <array>

namespace signcurator::stages {

namespace {

constexpr std::array<Stage, 4> kAllStages = {Stage::Face, Stage::Activity,
                                             Stage::Text, Stage::Judge};

const char* builtin_body(Stage stage) {
  switch (stage) {
    case Stage::Face:
      return
          "You are reviewing frames sampled from one short social-media video "
          "in {language_name}.\n"
          "Decide whether a person is present and whether their face is "
          "clearly visible and identifiable across the frames. A face that "
          "is obscured, cropped out of frame, or too blurry to recognize "
          "does not count as visible.\n"
          "Also count how many people appear.";
    case Stage::Activity:
      return
          "You are reviewing frames sampled from one short social-media video "
          "in {language_name}.\n"
          "Decide whether the person shown is primarily communicating in "
          "{language_name}: look for sustained hand articulation paired with "
          "facial grammar, as opposed to casual gesturing, dancing, or only "
          "speaking.";
    case Stage::Text:
      return
          "You are reviewing frames sampled from one short social-media video "
          "in {language_name}.\n"
          "Find any written translation of the signed content. Prefer a "
          "formal caption track when one is shown; otherwise use text "
          "embedded in the video frames. Ignore watermarks, usernames, "
          "hashtags, and promotional overlays.\n"
          "Return the text exactly as written. It should be in "
          "{spoken_language}.";
    case Stage::Judge:
      return
          "You are reviewing frames sampled from one short social-media video "
          "in {language_name}, together with a candidate caption.\n"
          "Candidate caption (between <<< and >>>):\n"
          "{caption_context}\n"
          "Decide whether this caption plausibly translates the signed "
          "content, as opposed to unrelated text such as a lesson title, an "
          "app promotion, or a song name.";
  }
  throw Error("unhandled stage value");
}

const char* builtin_hint(Stage stage) {
  switch (stage) {
    case Stage::Face:
      return
          "Reply with exactly one JSON object and nothing else: "
          "{\"face_visible\": true or false, \"people_count\": "
          "<nonnegative integer>}";
    case Stage::Activity:
      return
          "Reply with exactly one JSON object and nothing else: "
          "{\"is_signing\": true or false}";
    case Stage::Text:
      return
          "If the video contains no usable text, reply with exactly this "
          "sentence and nothing else: No text found.\n"
          "Otherwise reply with exactly one JSON object and nothing else: "
          "{\"text\": \"<the text>\", \"source\": \"FormalCaption\" or "
          "\"EmbeddedText\"}";
    case Stage::Judge:
      return
          "Reply with exactly one JSON object and nothing else: "
          "{\"aligned\": true or false, \"rationale\": \"<one short "
          "sentence>\"}";
  }
  throw Error("unhandled stage value");
}

std::string rtrim_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) {
    s.pop_back();
  }
  return s;
}

bool is_known_iso(const std::string& s) {
  return s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) {
           return c >= 'a' && c <= 'z';
         });
}

}  // namespace

TemplateSet TemplateSet::builtin() {
  TemplateSet set;
  for (Stage stage : kAllStages) {
    set.entries_[to_string(stage)] =
        PromptTemplate{stage, builtin_body(stage), builtin_hint(stage)};
  }
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& templates_dir) {
  TemplateSet set = builtin();
  if (!std::filesystem::is_directory(templates_dir)) {
    throw ConfigError("templates_dir is not a directory: " +
                      templates_dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(templates_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
      continue;
    }
    const std::string stem = entry.path().stem().string();  // face or face.gsg
    const auto dot = stem.find('.');
    const std::string stage_name = stem.substr(0, dot);
    Stage stage;
    try {
      stage = stage_from_string(stage_name);
    } catch (const ParseError&) {
      throw ConfigError("unrecognized template file name: " +
                        entry.path().filename().string());
    }
    if (dot != std::string::npos && !is_known_iso(stem.substr(dot + 1))) {
      throw ConfigError("template language suffix must be a three-letter "
                        "code: " + entry.path().filename().string());
    }
    set.entries_[stem] = PromptTemplate{
        stage, rtrim_newlines(read_file(entry.path())), builtin_hint(stage)};
  }
  return set;
}

const PromptTemplate& TemplateSet::for_stage(
    Stage stage, const std::string& language) const {
  const auto per_language = entries_.find(to_string(stage) + "." + language);
  if (per_language != entries_.end()) {
    return per_language->second;
  }
  const auto fallback = entries_.find(to_string(stage));
  if (fallback == entries_.end()) {
    throw ConfigError("no template for stage " + to_string(stage));
  }
  return fallback->second;
}

std::string TemplateSet::digest() const {
  detail::ordered_json j;
  for (const auto& [key, tpl] : entries_) {
    j[key] = {{"body", tpl.body}, {"hint", tpl.output_schema_hint}};
  }
  return sha256_hex(j.dump());
}

namespace {

std::string escape_caption(const std::string& caption) {
  std::string out;
  out.reserve(caption.size());
  for (std::size_t i = 0; i < caption.size(); ++i) {
    if (caption[i] == '\\') {
      out += "\\\\";
    } else if (caption.compare(i, 3, "<<<") == 0) {
      out += "\\<<<";
      i += 2;
    } else if (caption.compare(i, 3, ">>>") == 0) {
      out += "\\>>>";
      i += 2;
    } else {
      out.push_back(caption[i]);
    }
  }
  return out;
}

}  // namespace

std::string render_prompt(const PromptTemplate& tpl,
                          const corpus::LanguageCode& language,
                          const std::optional<std::string>& caption_context) {
  std::string out;
  out.reserve(tpl.body.size() + tpl.output_schema_hint.size() + 64);
  const std::string& body = tpl.body;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto open = body.find('{', pos);
    if (open == std::string::npos) {
      out.append(body, pos, std::string::npos);
      break;
    }
    out.append(body, pos, open - pos);
    const auto close = body.find('}', open);
    if (close == std::string::npos) {
      throw TemplateError("unterminated placeholder in " +
                          to_string(tpl.stage) + " template");
    }
    const std::string name = body.substr(open + 1, close - open - 1);
    if (name == "language_name") {
      out += language.display_name;
    } else if (name == "spoken_language") {
      out += language.spoken_name + " (" + language.spoken_language + ")";
    } else if (name == "caption_context") {
      if (!caption_context) {
        throw TemplateError("the " + to_string(tpl.stage) +
                            " template requires a caption_context");
      }
      out += "<<<" + escape_caption(*caption_context) + ">>>";
    } else {
      throw TemplateError("unresolved placeholder {" + name + "} in " +
                          to_string(tpl.stage) + " template");
    }
    pos = close + 1;
  }
  out += "\n\n";
  out += tpl.output_schema_hint;
  return out;
}

}  // namespace signcurator::stages
