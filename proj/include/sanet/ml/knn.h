#ifndef SANET_ML_KNN_H
#define SANET_ML_KNN_H

#include <cstdint>
#include <span>
#include <vector>

#include "sanet/ml/features.h"

namespace sanet::ml {

// k-nearest-neighbour classifier over min-max normalized features, with a
// k-d tree for the neighbour search. Neighbours are ordered by (squared
// Euclidean distance, training row); votes tie toward the lower class.
class KnnModel {
 public:
  // Throws kInvalidArgument unless 1 <= k <= train.size().
  static KnnModel Fit(std::span<const Sample> train, uint32_t k);

  // Restores a fitted model from its parts (points already normalized).
  static KnnModel FromParts(uint32_t k, Normalizer normalizer,
                            std::vector<FeatureVector> points,
                            std::vector<ClassLabel> labels);

  Prediction Predict(const FeatureVector& x) const;

  // Training rows of the k nearest neighbours of raw vector x, nearest first.
  std::vector<uint32_t> Neighbors(const FeatureVector& x) const;

  uint32_t k() const { return k_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const std::vector<FeatureVector>& points() const { return points_; }
  const std::vector<ClassLabel>& labels() const { return labels_; }

 private:
  struct Node {
    uint32_t begin = 0;  // range into order_
    uint32_t end = 0;
    int32_t dim = -1;    // -1 for buckets
    double split = 0.0;
    uint32_t left = 0;
    uint32_t right = 0;
  };

  void BuildIndex();

  uint32_t k_ = 1;
  Normalizer normalizer_;
  std::vector<FeatureVector> points_;
  std::vector<ClassLabel> labels_;
  std::vector<uint32_t> order_;
  std::vector<Node> nodes_;
};

// Squared Euclidean distance, summed in feature order.
double SquaredDistance(const FeatureVector& a, const FeatureVector& b);

}  // namespace sanet::ml

#endif  // SANET_ML_KNN_H
