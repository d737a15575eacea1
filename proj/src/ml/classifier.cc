#include "sanet/ml/classifier.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sanet/error.h"

namespace sanet::ml {

namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "sanet-model";
constexpr int kFormatVersion = 1;

json TreeParamsToJson(const TreeParams& p) {
  json j;
  j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
  j["min_samples_split"] = p.min_samples_split;
  return j;
}

TreeParams TreeParamsFromJson(const json& j) {
  TreeParams p;
  if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<uint32_t>();
  p.min_samples_split = j.at("min_samples_split").get<uint32_t>();
  return p;
}

json TreeToJson(const DecisionTreeModel& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.histogram}));
  }
  return json{{"params", TreeParamsToJson(tree.params())}, {"nodes", std::move(nodes)}};
}

DecisionTreeModel TreeFromJson(const json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& row : j.at("nodes")) {
    if (!row.is_array() || row.size() != 5) {
      throw Error(ErrorCode::kParseFailure, "tree node must be a 5-element array");
    }
    TreeNode n;
    n.feature = row[0].get<int32_t>();
    n.threshold = row[1].get<double>();
    n.left = row[2].get<uint32_t>();
    n.right = row[3].get<uint32_t>();
    n.histogram = row[4].get<std::array<uint64_t, kNumClasses>>();
    nodes.push_back(n);
  }
  return DecisionTreeModel::FromNodes(TreeParamsFromJson(j.at("params")),
                                      std::move(nodes));
}

json ToJson(const DecisionTreeModel& m) {
  return json{{"kind", "dt"}, {"tree", TreeToJson(m)}};
}

json ToJson(const KnnModel& m) {
  json labels = json::array();
  for (auto l : m.labels()) labels.push_back(l.class_no());
  return json{{"kind", "knn"},
              {"k", m.k()},
              {"min", m.normalizer().min()},
              {"max", m.normalizer().max()},
              {"points", m.points()},
              {"labels", std::move(labels)}};
}

json ToJson(const RandomForestModel& m) {
  const ForestParams& p = m.params();
  json trees = json::array();
  for (const auto& t : m.trees()) trees.push_back(TreeToJson(t));
  return json{{"kind", "rf"},
              {"params",
               {{"n_trees", p.n_trees},
                {"tree", TreeParamsToJson(p.tree)},
                {"features_per_split", p.features_per_split},
                {"bootstrap", p.bootstrap},
                {"seed", p.seed}}},
              {"trees", std::move(trees)}};
}

Classifier FromJson(const json& j) {
  if (j.at("format").get<std::string>() != kFormat ||
      j.at("version").get<int>() != kFormatVersion) {
    throw Error(ErrorCode::kParseFailure, "not a version-1 sanet model");
  }
  const json& m = j.at("model");
  ModelKind kind = ParseModelKind(m.at("kind").get<std::string>());
  switch (kind) {
    case ModelKind::kDecisionTree:
      return Classifier(TreeFromJson(m.at("tree")));
    case ModelKind::kKnn: {
      std::vector<ClassLabel> labels;
      for (const auto& l : m.at("labels")) {
        labels.push_back(ClassLabel::FromNumber(l.get<uint64_t>()));
      }
      return Classifier(KnnModel::FromParts(
          m.at("k").get<uint32_t>(),
          Normalizer::FromBounds(m.at("min").get<FeatureVector>(),
                                 m.at("max").get<FeatureVector>()),
          m.at("points").get<std::vector<FeatureVector>>(), std::move(labels)));
    }
    case ModelKind::kRandomForest: {
      const json& p = m.at("params");
      ForestParams params;
      params.n_trees = p.at("n_trees").get<uint32_t>();
      params.tree = TreeParamsFromJson(p.at("tree"));
      params.features_per_split = p.at("features_per_split").get<uint32_t>();
      params.bootstrap = p.at("bootstrap").get<bool>();
      params.seed = p.at("seed").get<uint64_t>();
      std::vector<DecisionTreeModel> trees;
      for (const auto& t : m.at("trees")) trees.push_back(TreeFromJson(t));
      if (trees.size() != params.n_trees) {
        throw Error(ErrorCode::kParseFailure, "tree count does not match n_trees");
      }
      return Classifier(RandomForestModel::FromTrees(params, std::move(trees)));
    }
  }
  throw Error(ErrorCode::kParseFailure, "unknown model kind");
}

}  // namespace

ModelKind ParseModelKind(std::string_view text) {
  if (text == "dt") return ModelKind::kDecisionTree;
  if (text == "knn") return ModelKind::kKnn;
  if (text == "rf") return ModelKind::kRandomForest;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model kind '" + std::string(text) + "' (dt, knn, rf)");
}

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDecisionTree: return "dt";
    case ModelKind::kKnn: return "knn";
    case ModelKind::kRandomForest: return "rf";
  }
  return "?";
}

Classifier Classifier::Train(std::span<const Sample> train, const TrainOptions& o) {
  switch (o.kind) {
    case ModelKind::kDecisionTree:
      return Classifier(DecisionTreeModel::Train(train, o.tree));
    case ModelKind::kKnn:
      return Classifier(KnnModel::Fit(train, o.k));
    case ModelKind::kRandomForest: {
      ForestParams p;
      p.n_trees = o.n_trees;
      p.tree = o.tree;
      p.features_per_split = o.features_per_split;
      p.bootstrap = o.bootstrap;
      p.seed = o.seed;
      return Classifier(RandomForestModel::Train(train, p));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind");
}

Prediction Classifier::Predict(const FeatureVector& x) const {
  return std::visit([&](const auto& m) { return m.Predict(x); }, model_);
}

ModelKind Classifier::kind() const {
  return static_cast<ModelKind>(model_.index());
}

std::string Classifier::Serialize() const {
  json doc{{"format", kFormat}, {"version", kFormatVersion}};
  doc["model"] = std::visit([](const auto& m) { return ToJson(m); }, model_);
  return doc.dump() + "\n";
}

Classifier Classifier::Deserialize(std::string_view text) {
  try {
    return FromJson(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("model document: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseFailure) throw;
    throw Error(ErrorCode::kParseFailure, e.what());
  }
}

void Classifier::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write '" + path + "'");
  out << Serialize();
  if (!out.flush()) throw Error(ErrorCode::kIoFailure, "write to '" + path + "' failed");
}

Classifier Classifier::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Deserialize(buf.str());
}

}  // namespace sanet::ml
