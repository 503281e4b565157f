#pragma once

#include <optional>
#include <string>
#include <vector>

namespace signcurator::corpus {

// Human annotation of one video: does the text genuinely translate the
// signing, and (optionally) a reference translation for agreement scoring.
struct GoldLabel {
  std::string video_id;
  bool is_valid_pair = false;
  std::optional<std::string> gold_translation;
};

// Parses the one-record-per-line gold label file. Blank lines are skipped.
// Malformed lines raise ParseError naming the 1-based line number; duplicate
// video ids raise ValidationError.
std::vector<GoldLabel> parse_gold_labels(const std::string& text);

}  // namespace signcurator::corpus
