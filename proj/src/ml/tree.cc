#include "sanet/ml/tree.h"

#include <algorithm>
#include <numeric>

#include "sanet/error.h"

namespace sanet::ml {

namespace {

using u128 = unsigned __int128;
using Counts = std::array<uint64_t, kNumClasses>;

// Purity of a split, sum(cl^2)/nl + sum(cr^2)/nr, kept as an exact
// fraction so that equal-gain candidates compare equal.
struct SplitScore {
  u128 num = 0;
  u128 den = 1;

  bool BetterThan(const SplitScore& other) const {
    return num * other.den > other.num * den;
  }
};

struct Candidate {
  int32_t feature = -1;
  double threshold = 0.0;
  SplitScore score;
};

double Midpoint(double lo, double hi) {
  double mid = lo + (hi - lo) / 2.0;
  if (!(mid >= lo && mid < hi)) mid = lo;
  return mid;
}

// Best threshold on one feature, or nothing if the feature is constant
// over the rows.
std::optional<Candidate> BestThreshold(std::span<const Sample> samples,
                                       std::span<const uint32_t> rows,
                                       const Counts& total, int32_t feature,
                                       std::vector<std::pair<double, uint8_t>>& buf) {
  buf.clear();
  for (uint32_t r : rows) {
    buf.emplace_back(samples[r].x[feature], samples[r].y.class_no());
  }
  std::sort(buf.begin(), buf.end());

  Counts left{};
  Counts right = total;
  uint64_t a = 0;  // sum of squared left counts
  uint64_t b = 0;  // sum of squared right counts
  for (uint64_t c : right) b += c * c;
  const uint64_t n = buf.size();

  std::optional<Candidate> best;
  for (uint64_t i = 0; i + 1 < n; ++i) {
    uint8_t c = buf[i].second;
    a += 2 * left[c] + 1;
    ++left[c];
    b -= 2 * right[c] - 1;
    --right[c];
    if (!(buf[i].first < buf[i + 1].first)) continue;
    uint64_t nl = i + 1;
    uint64_t nr = n - nl;
    SplitScore score{static_cast<u128>(a) * nr + static_cast<u128>(b) * nl,
                     static_cast<u128>(nl) * nr};
    if (!best || score.BetterThan(best->score)) {
      best = Candidate{feature, Midpoint(buf[i].first, buf[i + 1].first), score};
    }
  }
  return best;
}

}  // namespace

DecisionTreeModel BuildTree(std::span<const Sample> samples,
                            std::vector<uint32_t> rows, const TreeParams& params,
                            uint32_t features_per_split, Rng* rng) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");
  if (features_per_split == 0 || features_per_split > kNumFeatures) {
    throw Error(ErrorCode::kInvalidArgument, "features_per_split must be in 1..10");
  }
  if (features_per_split < kNumFeatures && rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "feature subsampling needs an RNG");
  }

  struct Work {
    uint32_t node;
    size_t begin;
    size_t end;
    uint32_t depth;
  };
  std::vector<TreeNode> nodes(1);
  std::vector<Work> stack{{0, 0, rows.size(), 0}};
  std::vector<std::pair<double, uint8_t>> buf;
  buf.reserve(rows.size());

  while (!stack.empty()) {
    Work w = stack.back();
    stack.pop_back();
    std::span<uint32_t> range(rows.data() + w.begin, w.end - w.begin);

    Counts hist{};
    for (uint32_t r : range) ++hist[samples[r].y.class_no()];
    nodes[w.node].histogram = hist;

    size_t classes_present = 0;
    for (uint64_t c : hist) classes_present += c > 0;
    bool depth_ok = !params.max_depth || w.depth < *params.max_depth;
    if (classes_present <= 1 || !depth_ok || range.size() < params.min_samples_split) {
      continue;
    }

    std::array<int32_t, kNumFeatures> order;
    std::iota(order.begin(), order.end(), 0);
    if (features_per_split < kNumFeatures) {
      for (size_t i = 0; i < kNumFeatures; ++i) {
        std::swap(order[i], order[i + UniformIndex(*rng, kNumFeatures - i)]);
      }
      std::sort(order.begin(), order.begin() + features_per_split);
    }

    std::optional<Candidate> best;
    for (size_t i = 0; i < features_per_split; ++i) {
      auto cand = BestThreshold(samples, range, hist, order[i], buf);
      if (cand && (!best || cand->score.BetterThan(best->score))) best = cand;
    }
    for (size_t i = features_per_split; !best && i < kNumFeatures; ++i) {
      best = BestThreshold(samples, range, hist, order[i], buf);
    }
    if (!best) continue;  // all rows share one feature vector

    auto mid = std::stable_partition(range.begin(), range.end(), [&](uint32_t r) {
      return samples[r].x[best->feature] <= best->threshold;
    });
    size_t split = w.begin + static_cast<size_t>(mid - range.begin());

    auto left = static_cast<uint32_t>(nodes.size());
    auto right = left + 1;
    nodes[w.node].feature = best->feature;
    nodes[w.node].threshold = best->threshold;
    nodes[w.node].left = left;
    nodes[w.node].right = right;
    nodes.emplace_back();
    nodes.emplace_back();
    stack.push_back({right, split, w.end, w.depth + 1});
    stack.push_back({left, w.begin, split, w.depth + 1});
  }
  return DecisionTreeModel::FromNodes(params, std::move(nodes));
}

DecisionTreeModel DecisionTreeModel::Train(std::span<const Sample> train,
                                           const TreeParams& params) {
  std::vector<uint32_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0u);
  return BuildTree(train, std::move(rows), params, kNumFeatures, nullptr);
}

DecisionTreeModel DecisionTreeModel::FromNodes(TreeParams params,
                                               std::vector<TreeNode> nodes) {
  if (nodes.empty()) throw Error(ErrorCode::kInvalidArgument, "tree has no nodes");
  // Children always come after their parent, so walking in index order
  // visits every node once if the table is a tree rooted at 0.
  std::vector<uint8_t> parents(nodes.size(), 0);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) continue;
    if (n.feature >= static_cast<int32_t>(kNumFeatures) || n.left <= i ||
        n.right <= i || n.left >= nodes.size() || n.right >= nodes.size() ||
        n.left == n.right) {
      throw Error(ErrorCode::kInvalidArgument,
                  "malformed tree node " + std::to_string(i));
    }
    ++parents[n.left];
    ++parents[n.right];
  }
  for (size_t i = 1; i < nodes.size(); ++i) {
    if (parents[i] != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tree node " + std::to_string(i) + " is not reachable exactly once");
    }
  }
  for (const TreeNode& n : nodes) {
    uint64_t sum = 0;
    for (uint64_t c : n.histogram) sum += c;
    if (sum == 0) throw Error(ErrorCode::kInvalidArgument, "empty node histogram");
  }
  DecisionTreeModel model;
  model.params_ = params;
  model.nodes_ = std::move(nodes);
  return model;
}

const TreeNode& DecisionTreeModel::LeafFor(const FeatureVector& x) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    node = &nodes_[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return *node;
}

Prediction DecisionTreeModel::Predict(const FeatureVector& x) const {
  const TreeNode& leaf = LeafFor(x);
  uint64_t total = 0;
  for (uint64_t c : leaf.histogram) total += c;
  Prediction p;
  for (size_t c = 0; c < kNumClasses; ++c) {
    p.scores[c] = static_cast<double>(leaf.histogram[c]) / static_cast<double>(total);
  }
  p.label = ArgmaxClass(p.scores);
  return p;
}

uint32_t DecisionTreeModel::depth() const {
  std::vector<uint32_t> depth(nodes_.size(), 0);
  uint32_t deepest = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

}  // namespace sanet::ml
