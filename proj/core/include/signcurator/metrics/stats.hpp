#pragma once

#include "signcurator/corpus/manifest.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace signcurator::metrics {

struct LanguageRow {
  std::string language;
  std::int64_t videos = 0;
  double hours = 0.0;  // unrounded
};

struct DatasetStats {
  std::vector<LanguageRow> rows;  // sorted by language code
  std::int64_t total_videos = 0;
  double total_hours = 0.0;
};

// Per-language video counts and hours summed from the manifest records.
// An empty manifest yields zero totals and no rows.
DatasetStats dataset_stats(const corpus::DatasetManifest& manifest);

// One "<language> <videos> <hours>" line per row plus a final
// "Total <videos> <hours>" line; hours rounded to whole hours for display.
std::string render_stats_table(const DatasetStats& stats);

}  // namespace signcurator::metrics
