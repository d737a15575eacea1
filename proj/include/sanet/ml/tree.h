#ifndef SANET_ML_TREE_H
#define SANET_ML_TREE_H

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sanet/ml/features.h"
#include "sanet/rng.h"

namespace sanet::ml {

struct TreeParams {
  std::optional<uint32_t> max_depth;  // unlimited when empty
  uint32_t min_samples_split = 2;
};

struct TreeNode {
  int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;
  uint32_t left = 0;
  uint32_t right = 0;
  std::array<uint64_t, kNumClasses> histogram{};

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// CART-style classification tree with Gini impurity. Candidate thresholds
// are midpoints between consecutive distinct values; vectors with
// x[feature] <= threshold go left.
class DecisionTreeModel {
 public:
  static DecisionTreeModel Train(std::span<const Sample> train,
                                 const TreeParams& params);

  // Rebuilds a model from its node table; throws kInvalidArgument if the
  // table is not a well-formed tree.
  static DecisionTreeModel FromNodes(TreeParams params, std::vector<TreeNode> nodes);

  Prediction Predict(const FeatureVector& x) const;
  const TreeNode& LeafFor(const FeatureVector& x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }
  uint32_t depth() const;

 private:
  TreeParams params_;
  std::vector<TreeNode> nodes_;
};

// Tree induction over a multiset of sample rows. With features_per_split
// below kNumFeatures, each split draws that many features from `rng` and
// evaluates them in ascending index order; if none yields a valid split,
// the remaining features are tried in draw order until one does.
DecisionTreeModel BuildTree(std::span<const Sample> samples,
                            std::vector<uint32_t> rows, const TreeParams& params,
                            uint32_t features_per_split, Rng* rng);

}  // namespace sanet::ml

#endif  // SANET_ML_TREE_H
