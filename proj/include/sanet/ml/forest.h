#ifndef SANET_ML_FOREST_H
#define SANET_ML_FOREST_H

#include <cstdint>
#include <span>
#include <vector>

#include "sanet/ml/tree.h"

namespace sanet::ml {

struct ForestParams {
  uint32_t n_trees = 50;
  TreeParams tree;
  uint32_t features_per_split = 3;
  bool bootstrap = true;
  uint64_t seed = 0;
};

// Bagged trees with per-split feature subsampling. Tree t draws from its own
// stream seeded by DeriveSeed(seed, t), so trees are independent of
// training order.
class RandomForestModel {
 public:
  // Throws kInvalidArgument if n_trees == 0 or features_per_split is not in
  // 1..10.
  static RandomForestModel Train(std::span<const Sample> train,
                                 const ForestParams& params);
  static RandomForestModel FromTrees(ForestParams params,
                                     std::vector<DecisionTreeModel> trees);

  // Scores are the mean of the per-tree leaf distributions.
  Prediction Predict(const FeatureVector& x) const;

  const std::vector<DecisionTreeModel>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }

 private:
  ForestParams params_;
  std::vector<DecisionTreeModel> trees_;
};

}  // namespace sanet::ml

#endif  // SANET_ML_FOREST_H
