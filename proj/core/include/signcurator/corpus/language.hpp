#pragma once

#include <optional>
#include <string>
#include <vector>

namespace signcurator::corpus {

// A sign language paired with the spoken language its captions are written in.
struct LanguageCode {
  std::string iso639_3;         // e.g. "ase"
  std::string display_name;     // e.g. "American Sign Language"
  std::string spoken_language;  // BCP 47 tag of the caption language, e.g. "en-US"
  std::string spoken_name;      // e.g. "English"
};

// Registry of known sign languages, preloaded with the eight built-ins and
// extensible at configuration time.
class LanguageRegistry {
 public:
  // Registry containing only the built-in languages.
  static LanguageRegistry builtin();

  // Registers a language. Replaces an existing entry with the same code.
  void add(LanguageCode language);

  // Lookup by ISO 639-3 code. Empty optional when unknown.
  std::optional<LanguageCode> find(const std::string& iso639_3) const;

  // Lookup that throws ConfigError naming the code when unknown.
  LanguageCode require(const std::string& iso639_3) const;

  // All registered languages in code order.
  std::vector<LanguageCode> all() const;

 private:
  std::vector<LanguageCode> entries_;
};

}  // namespace signcurator::corpus
