#include "signcurator/stages/verdicts.hpp"

#include "signcurator/error.hpp"

namespace signcurator::stages {

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Face: return "face";
    case Stage::Activity: return "activity";
    case Stage::Text: return "text";
    case Stage::Judge: return "judge";
  }
  throw Error("unhandled stage value");
}

Stage stage_from_string(const std::string& text) {
  if (text == "face") return Stage::Face;
  if (text == "activity") return Stage::Activity;
  if (text == "text") return Stage::Text;
  if (text == "judge") return Stage::Judge;
  throw ParseError("unknown stage: '" + text + "'");
}

std::string to_string(TextSource source) {
  switch (source) {
    case TextSource::FormalCaption: return "formal_caption";
    case TextSource::EmbeddedText: return "embedded_text";
    case TextSource::None: return "none";
  }
  throw Error("unhandled text source value");
}

TextSource text_source_from_string(const std::string& text) {
  if (text == "formal_caption") return TextSource::FormalCaption;
  if (text == "embedded_text") return TextSource::EmbeddedText;
  if (text == "none") return TextSource::None;
  throw ParseError("unknown text source: '" + text + "'");
}

}  // namespace signcurator::stages
