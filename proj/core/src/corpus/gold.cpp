#include "signcurator/corpus/gold.hpp"

#include "signcurator/error.hpp"

#include "../internal/json_util.hpp"

#include <set>
#include <sstream>

namespace signcurator::corpus {

std::vector<GoldLabel> parse_gold_labels(const std::string& text) {
  std::vector<GoldLabel> labels;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    detail::ordered_json j;
    try {
      j = detail::parse_json(line, "gold label");
    } catch (const ParseError& e) {
      throw ParseError("gold label line " + std::to_string(line_no) + ": " +
                       e.what(), line_no);
    }
    GoldLabel label;
    try {
      label.video_id = detail::require_string(j, "video_id", "gold label");
      label.is_valid_pair =
          detail::require_bool(j, "is_valid_pair", "gold label");
    } catch (const ParseError& e) {
      throw ParseError("gold label line " + std::to_string(line_no) + ": " +
                       e.what(), line_no);
    }
    if (label.video_id.empty()) {
      throw ParseError("gold label line " + std::to_string(line_no) +
                       ": video_id must be nonempty", line_no);
    }
    if (j.contains("gold_translation") && !j.at("gold_translation").is_null()) {
      if (!j.at("gold_translation").is_string()) {
        throw ParseError("gold label line " + std::to_string(line_no) +
                         ": gold_translation must be a string", line_no);
      }
      label.gold_translation = j.at("gold_translation").get<std::string>();
    }
    if (!seen.insert(label.video_id).second) {
      throw ValidationError("duplicate gold label for video " +
                            label.video_id);
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

}  // namespace signcurator::corpus
