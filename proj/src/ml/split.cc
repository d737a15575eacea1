#include "sanet/ml/split.h"

#include <algorithm>
#include <cmath>

#include "sanet/error.h"
#include "sanet/rng.h"

namespace sanet::ml {

SplitIndices StratifiedSplit(std::span<const ClassLabel> labels,
                             double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must be in (0, 1)");
  }
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "empty dataset");

  std::array<std::vector<size_t>, kNumClasses> by_class;
  for (size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i].class_no()].push_back(i);
  }
  SplitIndices out;
  for (size_t c = 0; c < kNumClasses; ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class " + std::string(ClassName(c)) + " has a single sample");
    }
    Rng rng(DeriveSeed(seed, c));
    for (size_t i = rows.size() - 1; i > 0; --i) {
      std::swap(rows[i], rows[UniformIndex(rng, i + 1)]);
    }
    auto n_train = static_cast<size_t>(
        std::llround(static_cast<double>(rows.size()) * train_fraction));
    n_train = std::clamp<size_t>(n_train, 1, rows.size() - 1);
    out.train.insert(out.train.end(), rows.begin(), rows.begin() + n_train);
    out.test.insert(out.test.end(), rows.begin() + n_train, rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SampleSplit StratifiedSplit(std::span<const Sample> samples, double train_fraction,
                            uint64_t seed) {
  std::vector<ClassLabel> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.y);
  SplitIndices idx = StratifiedSplit(labels, train_fraction, seed);
  SampleSplit out;
  out.train.reserve(idx.train.size());
  out.test.reserve(idx.test.size());
  for (size_t i : idx.train) out.train.push_back(samples[i]);
  for (size_t i : idx.test) out.test.push_back(samples[i]);
  return out;
}

}  // namespace sanet::ml
