#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace signcurator::stages {

enum class Stage {
  Face,
  Activity,
  Text,
  Judge,
};

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& text);

// Stage 1: is at least one face clearly visible?
struct FaceVerdict {
  bool face_visible = false;
  std::int64_t people_count = 0;
};

// Stage 2: is the visible person signing (vs. gesturing, dancing, ...)?
struct ActivityVerdict {
  bool is_signing = false;
};

enum class TextSource {
  FormalCaption,
  EmbeddedText,
  None,
};

std::string to_string(TextSource source);
TextSource text_source_from_string(const std::string& text);

// Stage 3: caption or on-screen text recovered from the video, if any.
struct TextExtraction {
  std::optional<std::string> text;
  TextSource source = TextSource::None;
};

// Stage 4: does the recovered text plausibly translate the signing?
struct JudgeVerdict {
  bool aligned = false;
  std::optional<std::string> rationale;
};

// The model replied but no verdict could be parsed out of it, even after a
// reprompt. Recorded verbatim so the failure is auditable.
struct UnparseableOutcome {
  std::string reason;
};

using VerdictOutcome = std::variant<FaceVerdict, ActivityVerdict,
                                    TextExtraction, JudgeVerdict,
                                    UnparseableOutcome>;

// One stage's result for one video, with enough context to audit it.
struct StageVerdict {
  Stage stage = Stage::Face;
  VerdictOutcome outcome;
  std::string model_id;
  std::string raw_response;
  std::int64_t latency_ms = 0;
  bool cached = false;
  std::int64_t attempts = 1;
};

}  // namespace signcurator::stages
