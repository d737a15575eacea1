#include "sanet/ml/forest.h"

#include <numeric>

#include "sanet/error.h"
#include "sanet/rng.h"

namespace sanet::ml {

RandomForestModel RandomForestModel::Train(std::span<const Sample> train,
                                           const ForestParams& params) {
  if (params.n_trees == 0) {
    throw Error(ErrorCode::kInvalidArgument, "a forest needs at least one tree");
  }
  if (params.features_per_split == 0 || params.features_per_split > kNumFeatures) {
    throw Error(ErrorCode::kInvalidArgument, "features_per_split must be in 1..10");
  }
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");

  std::vector<DecisionTreeModel> trees;
  trees.reserve(params.n_trees);
  for (uint32_t t = 0; t < params.n_trees; ++t) {
    Rng rng(DeriveSeed(params.seed, t));
    std::vector<uint32_t> rows(train.size());
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<uint32_t>(UniformIndex(rng, train.size()));
    } else {
      std::iota(rows.begin(), rows.end(), 0u);
    }
    trees.push_back(BuildTree(train, std::move(rows), params.tree,
                              params.features_per_split, &rng));
  }
  return FromTrees(params, std::move(trees));
}

RandomForestModel RandomForestModel::FromTrees(ForestParams params,
                                               std::vector<DecisionTreeModel> trees) {
  if (trees.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a forest needs at least one tree");
  }
  params.n_trees = static_cast<uint32_t>(trees.size());
  RandomForestModel model;
  model.params_ = params;
  model.trees_ = std::move(trees);
  return model;
}

Prediction RandomForestModel::Predict(const FeatureVector& x) const {
  Prediction p;
  for (const auto& tree : trees_) {
    Prediction vote = tree.Predict(x);
    for (size_t c = 0; c < kNumClasses; ++c) p.scores[c] += vote.scores[c];
  }
  for (double& s : p.scores) s /= static_cast<double>(trees_.size());
  p.label = ArgmaxClass(p.scores);
  return p;
}

}  // namespace sanet::ml
