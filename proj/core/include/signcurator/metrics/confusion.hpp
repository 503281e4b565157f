#pragma once

#include "signcurator/corpus/gold.hpp"
#include "signcurator/corpus/record.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace signcurator::metrics {

// Positive class: a valid sign-language/text pair that was accepted.
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
};

// Components are undefined (not zero) when their denominator is zero;
// conflating the two corrupts small-sample evaluations.
struct ClassificationReport {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
};

// Counts agreement between predicted accept/reject (true = accepted) and
// gold labels. Every gold id must have a prediction; missing ids raise
// CoverageError listing them.
ConfusionMatrix confusion_matrix(
    const std::map<std::string, bool>& predictions,
    const std::vector<corpus::GoldLabel>& gold);

// accuracy = (tp+tn)/total, precision = tp/(tp+fp), recall = tp/(tp+fn).
// An all-zero matrix raises InputError: every metric would be undefined.
ClassificationReport classification_metrics(const ConfusionMatrix& cm);

struct PredictionOptions {
  // Processing-error rejections are pipeline failures, not content
  // judgments; by default they are left out of the prediction map so they
  // cannot pollute precision/recall.
  bool include_processing_errors = false;
};

// Prediction map from terminal pipeline records (accepted = true). Records
// still in flight raise ValidationError; duplicate video ids keep the first
// occurrence.
std::map<std::string, bool> predictions_from_records(
    const std::vector<corpus::PipelineRecord>& records,
    const PredictionOptions& options = {});

// Gold ids whose records were dropped as processing errors; eval excludes
// these labels rather than reporting them as coverage gaps.
std::vector<std::string> processing_error_ids(
    const std::vector<corpus::PipelineRecord>& records);

}  // namespace signcurator::metrics
