#include "sanet/ml/knn.h"

#include <algorithm>
#include <numeric>
#include <utility>

#include "sanet/error.h"

namespace sanet::ml {

namespace {

constexpr uint32_t kBucketSize = 16;

using Candidate = std::pair<double, uint32_t>;  // (squared distance, row)

class NeighborHeap {
 public:
  explicit NeighborHeap(uint32_t k) : k_(k) { heap_.reserve(k + 1); }

  bool full() const { return heap_.size() >= k_; }
  double worst() const { return heap_.front().first; }

  void Offer(double dist, uint32_t row) {
    Candidate c{dist, row};
    if (!full()) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  std::vector<Candidate> Sorted() && {
    std::sort_heap(heap_.begin(), heap_.end());
    return std::move(heap_);
  }

 private:
  uint32_t k_;
  std::vector<Candidate> heap_;
};

}  // namespace

double SquaredDistance(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  for (size_t f = 0; f < kNumFeatures; ++f) {
    double d = a[f] - b[f];
    sum += d * d;
  }
  return sum;
}

KnnModel KnnModel::Fit(std::span<const Sample> train, uint32_t k) {
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");
  Normalizer normalizer = Normalizer::Fit(train);
  std::vector<FeatureVector> points;
  std::vector<ClassLabel> labels;
  points.reserve(train.size());
  labels.reserve(train.size());
  for (const auto& s : train) {
    points.push_back(normalizer.Apply(s.x));
    labels.push_back(s.y);
  }
  return FromParts(k, normalizer, std::move(points), std::move(labels));
}

KnnModel KnnModel::FromParts(uint32_t k, Normalizer normalizer,
                             std::vector<FeatureVector> points,
                             std::vector<ClassLabel> labels) {
  if (points.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "points and labels differ in length");
  }
  if (k < 1 || k > points.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "k=" + std::to_string(k) + " must be in 1.." +
                    std::to_string(points.size()));
  }
  if (points.size() > UINT32_MAX) {
    throw Error(ErrorCode::kInvalidArgument, "training set too large");
  }
  KnnModel model;
  model.k_ = k;
  model.normalizer_ = normalizer;
  model.points_ = std::move(points);
  model.labels_ = std::move(labels);
  model.BuildIndex();
  return model;
}

void KnnModel::BuildIndex() {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.clear();

  struct Work {
    uint32_t node;
  };
  nodes_.push_back({0, static_cast<uint32_t>(points_.size())});
  std::vector<Work> stack{{0}};
  while (!stack.empty()) {
    uint32_t id = stack.back().node;
    stack.pop_back();
    uint32_t begin = nodes_[id].begin;
    uint32_t end = nodes_[id].end;
    if (end - begin <= kBucketSize) continue;

    int32_t dim = -1;
    double widest = 0.0;
    for (size_t f = 0; f < kNumFeatures; ++f) {
      double lo = points_[order_[begin]][f];
      double hi = lo;
      for (uint32_t i = begin; i < end; ++i) {
        lo = std::min(lo, points_[order_[i]][f]);
        hi = std::max(hi, points_[order_[i]][f]);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        dim = static_cast<int32_t>(f);
      }
    }
    if (dim < 0) continue;  // identical points stay in one bucket

    uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](uint32_t a, uint32_t b) {
                       return std::make_pair(points_[a][dim], a) <
                              std::make_pair(points_[b][dim], b);
                     });
    auto left = static_cast<uint32_t>(nodes_.size());
    nodes_[id].dim = dim;
    nodes_[id].split = points_[order_[mid]][dim];
    nodes_[id].left = left;
    nodes_[id].right = left + 1;
    nodes_.push_back({begin, mid});
    nodes_.push_back({mid, end});
    stack.push_back({left + 1});
    stack.push_back({left});
  }
}

std::vector<uint32_t> KnnModel::Neighbors(const FeatureVector& x) const {
  const FeatureVector q = normalizer_.Apply(x);
  NeighborHeap heap(k_);

  // Far subtrees are skipped only when their lower bound is strictly worse
  // than the current k-th neighbour, so equal-distance rows still compete
  // on row index.
  auto search = [&](auto&& self, uint32_t id) -> void {
    const Node& node = nodes_[id];
    if (node.dim < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) {
        heap.Offer(SquaredDistance(q, points_[order_[i]]), order_[i]);
      }
      return;
    }
    double diff = q[node.dim] - node.split;
    uint32_t near = diff <= 0.0 ? node.left : node.right;
    uint32_t far = diff <= 0.0 ? node.right : node.left;
    self(self, near);
    if (!heap.full() || diff * diff <= heap.worst()) self(self, far);
  };
  search(search, 0);

  std::vector<uint32_t> rows;
  rows.reserve(k_);
  for (const auto& [dist, row] : std::move(heap).Sorted()) rows.push_back(row);
  return rows;
}

Prediction KnnModel::Predict(const FeatureVector& x) const {
  std::array<uint32_t, kNumClasses> votes{};
  for (uint32_t row : Neighbors(x)) ++votes[labels_[row].class_no()];
  Prediction p;
  for (size_t c = 0; c < kNumClasses; ++c) {
    p.scores[c] = static_cast<double>(votes[c]) / static_cast<double>(k_);
  }
  p.label = ArgmaxClass(p.scores);
  return p;
}

}  // namespace sanet::ml
