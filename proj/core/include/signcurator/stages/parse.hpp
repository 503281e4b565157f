#pragma once

#include "signcurator/stages/verdicts.hpp"

#include <string>
#include <vector>

namespace signcurator::stages {

// Extracts the stage's verdict from free-form model text: scans for the
// first parsable JSON object (code fences and prose are skipped naturally)
// and validates it against the stage schema. For the Text stage, a reply
// with no object but containing the exact sentinel "No text found." maps to
// an empty extraction. Lenient-but-auditable repairs (for example
// face_visible forced to false when people_count is 0) are described in
// `warnings`. Raises ResponseFormatError when no verdict can be recovered.
VerdictOutcome parse_verdict(const std::string& raw, Stage stage,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace signcurator::stages
