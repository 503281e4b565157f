#include "signcurator/metrics/stats.hpp"

#include <map>
#include <sstream>

namespace signcurator::metrics {

DatasetStats dataset_stats(const corpus::DatasetManifest& manifest) {
  std::map<std::string, LanguageRow> by_language;
  DatasetStats stats;
  for (const auto& record : manifest.records) {
    LanguageRow& row = by_language[record.language];
    row.language = record.language;
    row.videos += 1;
    row.hours += record.duration_s / 3600.0;
    stats.total_videos += 1;
    stats.total_hours += record.duration_s / 3600.0;
  }
  stats.rows.reserve(by_language.size());
  for (auto& [language, row] : by_language) {
    stats.rows.push_back(std::move(row));
  }
  return stats;
}

std::string render_stats_table(const DatasetStats& stats) {
  std::ostringstream out;
  for (const auto& row : stats.rows) {
    out << row.language << ' ' << row.videos << ' '
        << corpus::hours_rounded(row.hours * 3600.0) << '\n';
  }
  out << "Total " << stats.total_videos << ' '
      << corpus::hours_rounded(stats.total_hours * 3600.0) << '\n';
  return out.str();
}

}  // namespace signcurator::metrics
