#include "sanet/ml/features.h"

#include <algorithm>
#include <cmath>

#include "sanet/error.h"

namespace sanet::ml {

FeatureVector Featurize(const TelemetryRecord& r) {
  return {static_cast<double>(r.ingress_port),
          static_cast<double>(r.flow_interval_time),
          static_cast<double>(r.enq_qdepth),
          static_cast<double>(r.deq_qdepth),
          static_cast<double>(r.deq_timedelta),
          static_cast<double>(r.protocol),
          static_cast<double>(r.src_port),
          static_cast<double>(r.dst_port),
          static_cast<double>(r.src_ip),
          static_cast<double>(r.dst_ip)};
}

std::vector<Sample> ToSamples(std::span<const TelemetryRecord> records) {
  std::vector<Sample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    if (!r.label) throw Error(ErrorCode::kMissingLabel, "unlabeled record");
    samples.push_back({Featurize(r), *r.label});
  }
  return samples;
}

ClassLabel ArgmaxClass(const ClassScores& scores) {
  size_t best = 0;
  for (size_t c = 1; c < kNumClasses; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return ClassLabel::FromNumber(best);
}

Normalizer Normalizer::Fit(std::span<const Sample> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot fit normalizer on no data");
  }
  Normalizer n;
  n.min_ = samples.front().x;
  n.max_ = samples.front().x;
  for (const auto& s : samples) {
    for (size_t f = 0; f < kNumFeatures; ++f) {
      if (!std::isfinite(s.x[f])) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite feature value");
      }
      n.min_[f] = std::min(n.min_[f], s.x[f]);
      n.max_[f] = std::max(n.max_[f], s.x[f]);
    }
  }
  return n;
}

Normalizer Normalizer::FromBounds(const FeatureVector& min, const FeatureVector& max) {
  Normalizer n;
  n.min_ = min;
  n.max_ = max;
  return n;
}

FeatureVector Normalizer::Apply(const FeatureVector& x) const {
  FeatureVector out;
  for (size_t f = 0; f < kNumFeatures; ++f) {
    double range = max_[f] - min_[f];
    out[f] = range > 0.0 ? (x[f] - min_[f]) / range : 0.0;
  }
  return out;
}

}  // namespace sanet::ml
