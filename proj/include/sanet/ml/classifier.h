#ifndef SANET_ML_CLASSIFIER_H
#define SANET_ML_CLASSIFIER_H

#include <string>
#include <string_view>
#include <variant>

#include "sanet/ml/forest.h"
#include "sanet/ml/knn.h"
#include "sanet/ml/tree.h"

namespace sanet::ml {

enum class ModelKind { kDecisionTree, kKnn, kRandomForest };

// "dt", "knn", "rf"; throws kInvalidArgument otherwise.
ModelKind ParseModelKind(std::string_view text);
std::string_view ModelKindName(ModelKind kind);

struct TrainOptions {
  ModelKind kind = ModelKind::kDecisionTree;
  TreeParams tree;            // DT and RF trees
  uint32_t k = 5;             // KNN
  uint32_t n_trees = 50;      // RF
  uint32_t features_per_split = 3;
  bool bootstrap = true;
  uint64_t seed = 0;
};

// A trained model of any supported kind.
class Classifier {
 public:
  using Model = std::variant<DecisionTreeModel, KnnModel, RandomForestModel>;

  explicit Classifier(Model model) : model_(std::move(model)) {}

  static Classifier Train(std::span<const Sample> train, const TrainOptions& options);

  Prediction Predict(const FeatureVector& x) const;
  ModelKind kind() const;
  const Model& model() const { return model_; }

  // Self-describing JSON document; Deserialize(Serialize()) reproduces the
  // model exactly. Throws kParseFailure on malformed input.
  std::string Serialize() const;
  static Classifier Deserialize(std::string_view text);

  void Save(const std::string& path) const;
  static Classifier Load(const std::string& path);

 private:
  Model model_;
};

}  // namespace sanet::ml

#endif  // SANET_ML_CLASSIFIER_H
