#ifndef SANET_ML_FEATURES_H
#define SANET_ML_FEATURES_H

#include <array>
#include <span>
#include <vector>

#include "sanet/model.h"
#include "sanet/telemetry.h"

namespace sanet::ml {

inline constexpr size_t kNumFeatures = 10;

// The ten telemetry features in schema order.
using FeatureVector = std::array<double, kNumFeatures>;

// Per-class probabilities indexed by class number.
using ClassScores = std::array<double, kNumClasses>;

struct Prediction {
  ClassLabel label;
  ClassScores scores{};
};

struct Sample {
  FeatureVector x{};
  ClassLabel y;
};

FeatureVector Featurize(const TelemetryRecord& record);

// Labeled records -> samples. Throws kMissingLabel on an unlabeled record.
std::vector<Sample> ToSamples(std::span<const TelemetryRecord> records);

// Highest score wins; equal scores go to the lower class number.
ClassLabel ArgmaxClass(const ClassScores& scores);

// Min-max scaling fitted on training data. Degenerate features map to 0.
class Normalizer {
 public:
  Normalizer() { max_.fill(0.0); min_.fill(0.0); }

  static Normalizer Fit(std::span<const Sample> samples);
  static Normalizer FromBounds(const FeatureVector& min, const FeatureVector& max);

  FeatureVector Apply(const FeatureVector& x) const;

  const FeatureVector& min() const { return min_; }
  const FeatureVector& max() const { return max_; }

 private:
  FeatureVector min_;
  FeatureVector max_;
};

}  // namespace sanet::ml

#endif  // SANET_ML_FEATURES_H
