#include "signcurator/metrics/confusion.hpp"

#include "signcurator/error.hpp"

#include <algorithm>

namespace signcurator::metrics {

ConfusionMatrix confusion_matrix(
    const std::map<std::string, bool>& predictions,
    const std::vector<corpus::GoldLabel>& gold) {
  std::vector<std::string> missing;
  ConfusionMatrix cm;
  for (const auto& label : gold) {
    const auto it = predictions.find(label.video_id);
    if (it == predictions.end()) {
      missing.push_back(label.video_id);
      continue;
    }
    const bool predicted_accept = it->second;
    if (predicted_accept && label.is_valid_pair) {
      ++cm.tp;
    } else if (predicted_accept && !label.is_valid_pair) {
      ++cm.fp;
    } else if (!predicted_accept && label.is_valid_pair) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    std::string joined;
    for (const auto& id : missing) {
      if (!joined.empty()) {
        joined += ", ";
      }
      joined += id;
    }
    throw CoverageError("no prediction for " +
                        std::to_string(missing.size()) + " gold id(s): " +
                        joined);
  }
  return cm;
}

ClassificationReport classification_metrics(const ConfusionMatrix& cm) {
  if (cm.tp < 0 || cm.fp < 0 || cm.fn < 0 || cm.tn < 0) {
    throw InputError("confusion matrix counts must be nonnegative");
  }
  if (cm.total() == 0) {
    throw InputError("empty confusion matrix: every metric is undefined");
  }
  ClassificationReport report;
  report.accuracy =
      static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  if (cm.tp + cm.fp > 0) {
    report.precision =
        static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn > 0) {
    report.recall =
        static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  }
  return report;
}

std::map<std::string, bool> predictions_from_records(
    const std::vector<corpus::PipelineRecord>& records,
    const PredictionOptions& options) {
  std::map<std::string, bool> predictions;
  for (const auto& record : records) {
    const bool accepted = record.state == corpus::RecordState::Accepted;
    const bool rejected = record.state == corpus::RecordState::Rejected;
    if (!accepted && !rejected) {
      throw ValidationError("record '" + record.candidate.video_id +
                            "' is not terminal; predictions require a "
                            "finished run");
    }
    const bool processing_error =
        rejected && record.rejection_reason ==
                        corpus::RejectionReason::ProcessingError;
    if (processing_error && !options.include_processing_errors) {
      continue;
    }
    predictions.emplace(record.candidate.video_id, accepted);
  }
  return predictions;
}

std::vector<std::string> processing_error_ids(
    const std::vector<corpus::PipelineRecord>& records) {
  std::vector<std::string> ids;
  for (const auto& record : records) {
    if (record.state == corpus::RecordState::Rejected &&
        record.rejection_reason == corpus::RejectionReason::ProcessingError) {
      ids.push_back(record.candidate.video_id);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace signcurator::metrics
