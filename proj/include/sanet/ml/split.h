#ifndef SANET_ML_SPLIT_H
#define SANET_ML_SPLIT_H

#include <cstdint>
#include <span>
#include <vector>

#include "sanet/ml/features.h"

namespace sanet::ml {

struct SplitIndices {
  std::vector<size_t> train;  // ascending
  std::vector<size_t> test;   // ascending
};

// Stratified train/test partition. Each class contributes
// round(n_c * train_fraction) rows to train, clamped so both sides get at
// least one. Throws kClassTooSmall if a present class has < 2 rows.
SplitIndices StratifiedSplit(std::span<const ClassLabel> labels,
                             double train_fraction, uint64_t seed);

struct SampleSplit {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

SampleSplit StratifiedSplit(std::span<const Sample> samples, double train_fraction,
                            uint64_t seed);

}  // namespace sanet::ml

#endif  // SANET_ML_SPLIT_H
