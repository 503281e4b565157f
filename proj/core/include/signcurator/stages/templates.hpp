#pragma once

#include "signcurator/corpus/language.hpp"
#include "signcurator/stages/verdicts.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace signcurator::stages {

struct PromptTemplate {
  Stage stage = Stage::Face;
  // Free text with {language_name}, {spoken_language} and {caption_context}
  // placeholders.
  std::string body;
  // Reply-format contract appended to every rendered prompt. Fixed per
  // stage: response parsing depends on it, so template files override only
  // the body.
  std::string output_schema_hint;
};

// The active template per (stage, language), with per-stage defaults.
class TemplateSet {
 public:
  // Compiled-in defaults (identical to the shipped templates/ files).
  static TemplateSet builtin();

  // Defaults overridden by <stage>.txt, per-language variants added from
  // <stage>.<iso>.txt. Unrecognized template file names raise ConfigError.
  static TemplateSet load(const std::filesystem::path& templates_dir);

  // Per-language template when one exists, else the stage default.
  const PromptTemplate& for_stage(Stage stage,
                                  const std::string& language) const;

  // Digest over every template body and hint; part of the pipeline config
  // digest so edited prompts invalidate checkpoints.
  std::string digest() const;

 private:
  std::map<std::string, PromptTemplate> entries_;  // "face" or "face.gsg"
};

// Substitutes placeholders and appends the schema hint. caption_context is
// wrapped in <<< >>> delimiters with delimiter sequences inside it escaped.
// A placeholder that cannot be resolved (unknown name, or {caption_context}
// without a caption) raises TemplateError.
std::string render_prompt(const PromptTemplate& tpl,
                          const corpus::LanguageCode& language,
                          const std::optional<std::string>& caption_context);

}  // namespace signcurator::stages
