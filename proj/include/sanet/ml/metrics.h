#ifndef SANET_ML_METRICS_H
#define SANET_ML_METRICS_H

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sanet/ml/features.h"

namespace sanet::ml {

using ConfusionMatrix = std::array<std::array<uint64_t, kNumClasses>, kNumClasses>;

struct EvalReport {
  size_t samples = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double mse = 0.0;  // over class numbers
  double macro_precision = 0.0;
  ConfusionMatrix confusion{};  // [truth][prediction]

  bool operator==(const EvalReport&) const = default;
};

// Macro averages run over the classes that occur in `truths`; a class that
// is never predicted has precision 0. Throws kLengthMismatch on empty or
// unequal inputs.
EvalReport Evaluate(std::span<const ClassLabel> predictions,
                    std::span<const ClassLabel> truths);

struct RocPoint {
  double threshold = 0.0;  // +inf for the (0,0) anchor
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  ClassLabel cls;
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// One-vs-rest curve for `cls`: one point per distinct score, highest first,
// anchored at (0,0); AUC by the trapezoid rule. Throws kSingleClassOnly if
// truths lack positives or negatives for `cls`.
RocCurve Roc(std::span<const ClassScores> scores, std::span<const ClassLabel> truths,
             ClassLabel cls);

// Table row: "accuracy=0.99 f1=0.99 mse=0.001 precision=0.87" style output.
std::string FormatReportRow(const std::string& model, const EvalReport& report);

}  // namespace sanet::ml

#endif  // SANET_ML_METRICS_H
