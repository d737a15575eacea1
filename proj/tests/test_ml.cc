#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "sanet/error.h"
#include "sanet/ml/classifier.h"
#include "sanet/ml/metrics.h"
#include "sanet/ml/split.h"

using namespace sanet;
using namespace sanet::ml;

namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

const ClassLabel kA = ClassLabel::FromNumber(0);
const ClassLabel kB = ClassLabel::FromNumber(1);

Sample S1(double x0, ClassLabel y) {
  Sample s;
  s.x[0] = x0;
  s.y = y;
  return s;
}

// Points around six well-separated centres with small integer-valued noise.
std::vector<Sample> Blobs(size_t per_class, uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (size_t c = 0; c < kNumClasses; ++c) {
    for (size_t i = 0; i < per_class; ++i) {
      Sample s;
      for (size_t f = 0; f < kNumFeatures; ++f) {
        double centre = static_cast<double>((c * 7 + f * 3) % 11) * 100.0;
        s.x[f] = centre + static_cast<double>(UniformIndex(rng, 40));
      }
      s.y = ClassLabel::FromNumber(c);
      out.push_back(s);
    }
  }
  return out;
}

// Uniform points with random labels.
std::vector<Sample> RandomPoints(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out(n);
  for (auto& s : out) {
    for (size_t f = 0; f < kNumFeatures; ++f) s.x[f] = static_cast<double>(UniformIndex(rng, 1000));
    s.y = ClassLabel::FromNumber(UniformIndex(rng, kNumClasses));
  }
  return out;
}

}  // namespace

TEST_CASE("featurize keeps the schema order") {
  TelemetryRecord r;
  r.ingress_port = 1;
  r.flow_interval_time = 2;
  r.enq_qdepth = 3;
  r.deq_qdepth = 4;
  r.deq_timedelta = 5;
  r.protocol = 6;
  r.src_port = 7;
  r.dst_port = 8;
  r.src_ip = 9;
  r.dst_ip = 10;
  r.timestamp_us = 999;
  FeatureVector x = Featurize(r);
  for (size_t f = 0; f < kNumFeatures; ++f) CHECK(x[f] == static_cast<double>(f + 1));
  std::vector<TelemetryRecord> unlabeled = {r};
  CHECK(CodeOf([&] { ToSamples(unlabeled); }) == ErrorCode::kMissingLabel);
}

TEST_CASE("argmax ties go to the lower class") {
  ClassScores s{};
  s[3] = 0.5;
  s[1] = 0.5;
  CHECK(ArgmaxClass(s).class_no() == 1);
}

TEST_CASE("stratified split") {
  std::vector<ClassLabel> labels;
  for (size_t c = 0; c < kNumClasses; ++c) labels.insert(labels.end(), 1000, ClassLabel::FromNumber(c));
  SplitIndices s = StratifiedSplit(labels, 0.8, 42);
  CHECK(s.train.size() == 4800);
  CHECK(s.test.size() == 1200);
  std::vector<size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<size_t> expected(6000);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  std::array<size_t, kNumClasses> per{};
  for (size_t i : s.test) ++per[labels[i].class_no()];
  for (size_t n : per) CHECK(n == 200);

  SplitIndices again = StratifiedSplit(labels, 0.8, 42);
  CHECK(again.train == s.train);
  SplitIndices other = StratifiedSplit(labels, 0.8, 43);
  CHECK(other.train != s.train);

  std::vector<ClassLabel> lonely = {kA, kA, kB};
  CHECK(CodeOf([&] { StratifiedSplit(lonely, 0.8, 1); }) == ErrorCode::kClassTooSmall);
}

TEST_CASE("tree on a single informative feature") {
  std::vector<Sample> train = {S1(1, kA), S1(10, kB)};
  auto tree = DecisionTreeModel::Train(train, {});
  REQUIRE(tree.nodes().size() == 3);
  const TreeNode& root = tree.nodes()[0];
  CHECK(root.feature == 0);
  CHECK(root.threshold > 1.0);
  CHECK(root.threshold < 10.0);
  CHECK(tree.Predict(S1(0, kA).x).label == kA);
  CHECK(tree.Predict(S1(100, kA).x).label == kB);
}

TEST_CASE("tree depth limits and leaf distributions") {
  std::vector<Sample> train = {S1(1, kA), S1(2, kA), S1(3, kA), S1(4, kB)};
  TreeParams stump;
  stump.max_depth = 0;
  auto root_only = DecisionTreeModel::Train(train, stump);
  REQUIRE(root_only.nodes().size() == 1);
  Prediction p = root_only.Predict(S1(4, kB).x);
  CHECK(p.label == kA);
  CHECK(p.scores[0] == doctest::Approx(0.75));
  CHECK(p.scores[1] == doctest::Approx(0.25));

  std::vector<Sample> pure = {S1(1, kB), S1(5, kB), S1(9, kB)};
  auto leaf = DecisionTreeModel::Train(pure, {});
  CHECK(leaf.nodes().size() == 1);
  CHECK(leaf.Predict(S1(3, kA).x).scores[1] == 1.0);

  // Identical vectors with mixed labels cannot be split.
  std::vector<Sample> clash = {S1(1, kA), S1(1, kB), S1(1, kB)};
  auto mixed = DecisionTreeModel::Train(clash, {});
  CHECK(mixed.nodes().size() == 1);
  CHECK(mixed.Predict(S1(1, kA).x).label == kB);

  auto full = DecisionTreeModel::Train(train, {});
  for (const auto& s : train) CHECK(full.Predict(s.x).label == s.y);
}

TEST_CASE("tree node tables are validated on load") {
  std::vector<TreeNode> dangling(1);
  dangling[0].feature = 0;
  dangling[0].left = 5;
  dangling[0].right = 6;
  CHECK(CodeOf([&] { DecisionTreeModel::FromNodes({}, dangling); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("knn small cases") {
  std::vector<Sample> train = {S1(0, kA), S1(1, kA), S1(2, kB), S1(10, kB)};
  auto one = KnnModel::Fit(train, 1);
  for (const auto& s : train) CHECK(one.Predict(s.x).label == s.y);

  auto three = KnnModel::Fit(train, 3);
  Prediction p = three.Predict(S1(0.9, kA).x);
  CHECK(p.label == kA);
  CHECK(p.scores[0] == doctest::Approx(2.0 / 3.0));
  CHECK(p.scores[1] == doctest::Approx(1.0 / 3.0));

  auto two = KnnModel::Fit(train, 2);
  CHECK(two.Predict(S1(1.5, kA).x).label == kA);  // one A, one B: lower class
  CHECK(two.Neighbors(S1(1.5, kA).x) == std::vector<uint32_t>{1, 2});

  CHECK(CodeOf([&] { KnnModel::Fit(train, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { KnnModel::Fit(train, 5); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("knn agrees with a full scan") {
  auto train = RandomPoints(2000, 5);
  auto queries = RandomPoints(300, 6);
  for (uint32_t k : {1u, 5u, 8u}) {
    auto model = KnnModel::Fit(train, k);
    size_t mismatches = 0;
    for (const auto& q : queries) {
      if (model.Predict(q.x).label != oracle::BruteForceKnn(train, k, q.x)) ++mismatches;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("knn with duplicate points orders by training row") {
  std::vector<Sample> train = {S1(5, kB), S1(5, kA), S1(5, kB), S1(0, kA)};
  auto model = KnnModel::Fit(train, 2);
  CHECK(model.Neighbors(S1(5, kA).x) == std::vector<uint32_t>{0, 1});
  CHECK(model.Predict(S1(5, kA).x).label == kA);
}

TEST_CASE("forest degenerates to a tree") {
  auto data = Blobs(60, 9);
  ForestParams fp;
  fp.n_trees = 1;
  fp.bootstrap = false;
  fp.features_per_split = kNumFeatures;
  auto forest = RandomForestModel::Train(data, fp);
  auto tree = DecisionTreeModel::Train(data, {});
  CHECK(forest.trees()[0].nodes() == tree.nodes());
  for (const auto& q : RandomPoints(200, 10)) {
    CHECK(forest.Predict(q.x).label == tree.Predict(q.x).label);
  }
}

TEST_CASE("forest determinism and parameters") {
  auto data = Blobs(40, 11);
  ForestParams fp;
  fp.n_trees = 7;
  fp.seed = 99;
  auto a = RandomForestModel::Train(data, fp);
  auto b = RandomForestModel::Train(data, fp);
  REQUIRE(a.trees().size() == 7);
  for (size_t t = 0; t < 7; ++t) CHECK(a.trees()[t].nodes() == b.trees()[t].nodes());

  fp.n_trees = 0;
  CHECK(CodeOf([&] { RandomForestModel::Train(data, fp); }) == ErrorCode::kInvalidArgument);
  fp.n_trees = 3;
  fp.features_per_split = 11;
  CHECK(CodeOf([&] { RandomForestModel::Train(data, fp); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("forest averages leaf distributions and ties low") {
  auto says_b = DecisionTreeModel::Train(std::vector<Sample>{S1(0, kB)}, {});
  auto says_a = DecisionTreeModel::Train(std::vector<Sample>{S1(0, kA)}, {});
  auto forest = RandomForestModel::FromTrees({}, {says_b, says_a});
  Prediction p = forest.Predict(S1(0, kA).x);
  CHECK(p.scores[0] == doctest::Approx(0.5));
  CHECK(p.scores[1] == doctest::Approx(0.5));
  CHECK(p.label == kA);
}

TEST_CASE("evaluation report") {
  auto L = [](std::initializer_list<int> v) {
    std::vector<ClassLabel> out;
    for (int n : v) out.push_back(ClassLabel::FromNumber(static_cast<uint64_t>(n)));
    return out;
  };
  EvalReport r = Evaluate(L({0, 0, 5, 5}), L({0, 5, 5, 5}));
  CHECK(r.samples == 4);
  CHECK(r.accuracy == doctest::Approx(0.75));
  CHECK(r.mse == doctest::Approx(6.25));
  // class 0: p=1/2 r=1 f1=2/3; class 5: p=1 r=2/3 f1=4/5.
  CHECK(r.macro_f1 == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
  CHECK(r.macro_precision == doctest::Approx(0.75));
  CHECK(r.confusion[5][0] == 1);
  CHECK(r.confusion[5][5] == 2);

  EvalReport perfect = Evaluate(L({1, 2, 3}), L({1, 2, 3}));
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);
  CHECK(perfect.mse == 0.0);

  CHECK(CodeOf([&] { Evaluate(L({0}), L({0, 1})); }) == ErrorCode::kLengthMismatch);
  CHECK(CodeOf([&] { Evaluate(L({}), L({})); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("roc curves") {
  auto scored = [](std::vector<double> pos) {
    std::vector<ClassScores> out;
    for (double v : pos) {
      ClassScores s{};
      s[0] = v;
      s[1] = 1.0 - v;
      out.push_back(s);
    }
    return out;
  };
  std::vector<ClassLabel> truth = {kA, kA, kB, kB};

  RocCurve mixed = Roc(scored({0.9, 0.4, 0.6, 0.1}), truth, kA);
  CHECK(mixed.auc == doctest::Approx(0.75));
  REQUIRE(mixed.points.size() == 5);
  CHECK(std::isinf(mixed.points[0].threshold));
  CHECK(mixed.points[0].fpr == 0.0);
  CHECK(mixed.points[0].tpr == 0.0);
  CHECK(mixed.points.back().fpr == 1.0);
  CHECK(mixed.points.back().tpr == 1.0);

  CHECK(Roc(scored({0.5, 0.5, 0.5, 0.5}), truth, kA).auc == doctest::Approx(0.5));
  CHECK(Roc(scored({0.9, 0.8, 0.2, 0.1}), truth, kA).auc == 1.0);
  CHECK(Roc(scored({0.1, 0.2, 0.8, 0.9}), truth, kA).auc == 0.0);

  std::vector<ClassLabel> all_a = {kA, kA, kA, kA};
  CHECK(CodeOf([&] { Roc(scored({0.1, 0.2, 0.3, 0.4}), all_a, kA); }) ==
        ErrorCode::kSingleClassOnly);
}

TEST_CASE("roc area matches pairwise ranking") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 2 + UniformIndex(rng, 60);
    std::vector<ClassScores> scores(n);
    std::vector<ClassLabel> truth(n);
    std::vector<double> raw(n);
    auto positive = std::make_unique<bool[]>(n);
    for (size_t i = 0; i < n; ++i) {
      raw[i] = static_cast<double>(UniformIndex(rng, 12)) / 11.0;  // plenty of ties
      scores[i][2] = raw[i];
      positive[i] = i == 0 || (i > 1 && UniformIndex(rng, 2) == 1);
      truth[i] = ClassLabel::FromNumber(positive[i] ? 2 : 4);
    }
    double expected = oracle::PairwiseAuc(raw, std::span<const bool>(positive.get(), n));
    CHECK(Roc(scores, truth, ClassLabel::FromNumber(2)).auc == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("min-max normalization makes knn scale invariant") {
  auto train = RandomPoints(400, 21);
  auto queries = RandomPoints(100, 22);
  auto scaled = [](std::vector<Sample> v) {
    for (auto& s : v) {
      for (size_t f = 0; f < kNumFeatures; ++f) s.x[f] = s.x[f] * 4.0 + 1000.0;
    }
    return v;
  };
  auto base = KnnModel::Fit(train, 5);
  auto moved = KnnModel::Fit(scaled(train), 5);
  auto moved_q = scaled(queries);
  for (size_t i = 0; i < queries.size(); ++i) {
    CHECK(base.Predict(queries[i].x).label == moved.Predict(moved_q[i].x).label);
  }
}

TEST_CASE("tree predictions survive permuting training rows") {
  auto data = Blobs(50, 31);
  auto shuffled = data;
  Rng rng(32);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto a = DecisionTreeModel::Train(data, {});
  auto b = DecisionTreeModel::Train(shuffled, {});
  for (const auto& q : RandomPoints(300, 33)) CHECK(a.Predict(q.x).label == b.Predict(q.x).label);
}

TEST_CASE("classifier wrapper trains, saves and reloads every kind") {
  auto data = Blobs(30, 41);
  auto queries = RandomPoints(100, 42);
  for (ModelKind kind : {ModelKind::kDecisionTree, ModelKind::kKnn, ModelKind::kRandomForest}) {
    CAPTURE(ModelKindName(kind));
    TrainOptions opt;
    opt.kind = kind;
    opt.n_trees = 5;
    opt.seed = 3;
    Classifier c = Classifier::Train(data, opt);
    CHECK(c.kind() == kind);
    for (const auto& s : data) CHECK(c.Predict(s.x).label == s.y);
    Classifier back = Classifier::Deserialize(c.Serialize());
    CHECK(back.Serialize() == c.Serialize());
    for (const auto& q : queries) {
      Prediction p1 = c.Predict(q.x);
      Prediction p2 = back.Predict(q.x);
      CHECK(p1.label == p2.label);
      CHECK(p1.scores == p2.scores);
    }
  }
  CHECK(ParseModelKind("knn") == ModelKind::kKnn);
  CHECK(CodeOf([] { ParseModelKind("svm"); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { Classifier::Deserialize("{\"kind\":\"dt\"}"); }) == ErrorCode::kParseFailure);
  CHECK(CodeOf([] { Classifier::Deserialize("not json"); }) == ErrorCode::kParseFailure);
}
