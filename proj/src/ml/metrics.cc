#include "sanet/ml/metrics.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>

#include "sanet/error.h"

namespace sanet::ml {

EvalReport Evaluate(std::span<const ClassLabel> predictions,
                    std::span<const ClassLabel> truths) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(truths.size()) + " truths");
  }
  EvalReport report;
  report.samples = truths.size();
  uint64_t squared_error = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    int t = truths[i].class_no();
    int p = predictions[i].class_no();
    ++report.confusion[t][p];
    squared_error += static_cast<uint64_t>((t - p) * (t - p));
  }

  uint64_t correct = 0;
  for (size_t c = 0; c < kNumClasses; ++c) correct += report.confusion[c][c];
  const auto n = static_cast<double>(truths.size());
  report.accuracy = static_cast<double>(correct) / n;
  report.mse = static_cast<double>(squared_error) / n;

  double precision_sum = 0.0;
  double f1_sum = 0.0;
  size_t present = 0;
  for (size_t c = 0; c < kNumClasses; ++c) {
    uint64_t actual = 0;
    uint64_t predicted = 0;
    for (size_t j = 0; j < kNumClasses; ++j) {
      actual += report.confusion[c][j];
      predicted += report.confusion[j][c];
    }
    if (actual == 0) continue;
    ++present;
    uint64_t tp = report.confusion[c][c];
    double precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    double recall = static_cast<double>(tp) / actual;
    precision_sum += precision;
    if (precision + recall > 0.0) {
      f1_sum += 2.0 * precision * recall / (precision + recall);
    }
  }
  report.macro_precision = precision_sum / static_cast<double>(present);
  report.macro_f1 = f1_sum / static_cast<double>(present);
  return report;
}

RocCurve Roc(std::span<const ClassScores> scores, std::span<const ClassLabel> truths,
             ClassLabel cls) {
  if (scores.size() != truths.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and truths differ in length");
  }
  const size_t c = cls.class_no();
  std::vector<std::pair<double, bool>> ranked;
  ranked.reserve(scores.size());
  uint64_t positives = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    bool positive = truths[i] == cls;
    positives += positive;
    ranked.emplace_back(scores[i][c], positive);
  }
  const uint64_t negatives = ranked.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kSingleClassOnly,
                "class " + std::string(cls.name()) + " needs positives and negatives");
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.cls = cls;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  // Twice the area in units of one (negative, positive) cell: each step of
  // df negatives while tp moves from tp0 to tp1 adds df * (tp0 + tp1).
  unsigned __int128 twice_area = 0;
  uint64_t tp = 0;
  uint64_t fp = 0;
  for (size_t i = 0; i < ranked.size();) {
    double threshold = ranked[i].first;
    uint64_t tp0 = tp;
    uint64_t fp0 = fp;
    for (; i < ranked.size() && ranked[i].first == threshold; ++i) {
      ranked[i].second ? ++tp : ++fp;
    }
    twice_area += static_cast<unsigned __int128>(fp - fp0) * (tp0 + tp);
    curve.points.push_back({threshold, static_cast<double>(fp) / negatives,
                            static_cast<double>(tp) / positives});
  }
  curve.auc = static_cast<double>(twice_area) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

std::string FormatReportRow(const std::string& model, const EvalReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-20s accuracy=%.4f f1_score=%.4f mse=%.4f precision=%.4f n=%zu",
                model.c_str(), report.accuracy, report.macro_f1, report.mse,
                report.macro_precision, report.samples);
  return buf;
}

}  // namespace sanet::ml
