#include "signcurator/corpus/language.hpp"

#include "signcurator/error.hpp"

#include <algorithm>

namespace signcurator::corpus {

LanguageRegistry LanguageRegistry::builtin() {
  LanguageRegistry r;
  r.add({"ase", "American Sign Language", "en-US", "English"});
  r.add({"asf", "Australian Sign Language", "en-AU", "English"});
  r.add({"bfi", "British Sign Language", "en-GB", "English"});
  r.add({"csl", "Chinese Sign Language", "zh-CN", "Chinese"});
  r.add({"fsl", "French Sign Language", "fr-FR", "French"});
  r.add({"gsg", "German Sign Language", "de-DE", "German"});
  r.add({"ise", "Italian Sign Language", "it-IT", "Italian"});
  r.add({"swl", "Swedish Sign Language", "sv-SE", "Swedish"});
  return r;
}

void LanguageRegistry::add(LanguageCode language) {
  if (language.iso639_3.size() != 3 ||
      !std::all_of(language.iso639_3.begin(), language.iso639_3.end(),
                   [](char c) { return c >= 'a' && c <= 'z'; })) {
    throw ConfigError("language code must be three lowercase letters: '" +
                      language.iso639_3 + "'");
  }
  for (auto& entry : entries_) {
    if (entry.iso639_3 == language.iso639_3) {
      entry = std::move(language);
      return;
    }
  }
  entries_.push_back(std::move(language));
}

std::optional<LanguageCode> LanguageRegistry::find(
    const std::string& iso639_3) const {
  for (const auto& entry : entries_) {
    if (entry.iso639_3 == iso639_3) {
      return entry;
    }
  }
  return std::nullopt;
}

LanguageCode LanguageRegistry::require(const std::string& iso639_3) const {
  if (auto found = find(iso639_3)) {
    return *found;
  }
  throw ConfigError("unknown language code: '" + iso639_3 + "'");
}

std::vector<LanguageCode> LanguageRegistry::all() const {
  std::vector<LanguageCode> out = entries_;
  std::sort(out.begin(), out.end(),
            [](const LanguageCode& a, const LanguageCode& b) {
              return a.iso639_3 < b.iso639_3;
            });
  return out;
}

}  // namespace signcurator::corpus
