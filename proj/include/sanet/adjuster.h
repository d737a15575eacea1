#ifndef SANET_ADJUSTER_H
#define SANET_ADJUSTER_H

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sanet/collector.h"
#include "sanet/ml/classifier.h"
#include "sanet/model.h"
#include "sanet/switch.h"

namespace sanet {

// Operator intent: which priority each traffic class should get.
struct Policy {
  std::map<ClassLabel, PriorityLevel> class_priority;
  std::map<FlowKey, PriorityLevel> flow_overrides;
  uint64_t epoch_us = 1'000'000;
  double min_confidence = 0.0;

  // Throws kValueOutOfRange if a level has no queue on the switch, or
  // kConfigInvalid for a bad epoch/confidence.
  void Validate(uint8_t num_priorities) const;
};

// Line-oriented policy text:
//   Cameras = 6                         class name -> priority level
//   epoch_us = 1000000
//   min_confidence = 0.5
//   10.0.0.1,10.0.0.3,5000,5004,17 -> 7 flow override
// '#' starts a comment. Throws kConfigInvalid.
Policy ParsePolicy(std::string_view text);
Policy LoadPolicy(const std::string& path);

// Override first; otherwise the predicted class's level if the top score
// reaches min_confidence and the class is mapped.
std::optional<PriorityLevel> Decide(const ml::Prediction& prediction,
                                    const FlowKey& key, const Policy& policy);

struct AdjustmentEntry {
  SimTime time;
  FlowId flow_id;
  FlowKey key;
  PriorityLevel old_priority;
  PriorityLevel new_priority;
  ClassLabel predicted;
  double confidence = 0.0;
};

class AdjustmentLog {
 public:
  // Throws kInvalidArgument if `entry` is older than the last entry.
  void Append(AdjustmentEntry entry);
  const std::vector<AdjustmentEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  void WriteCsv(std::ostream& out) const;

 private:
  std::vector<AdjustmentEntry> entries_;
};

// Writes prio_reg[flow_id] through the control endpoint and logs it, even
// when the level is unchanged. Switch errors propagate.
void Apply(FlowId flow_id, const FlowKey& key, PriorityLevel priority,
           SwitchControl& control, AdjustmentLog& log, SimTime now,
           const ml::Prediction& prediction);

// Writes both mirror registers back to back; callers run between packet
// events, so no packet observes one without the other.
void SetMirroring(SwitchControl& control, bool flag, uint64_t interval_us);

// The measure -> classify -> adjust loop.
class Adjuster {
 public:
  Adjuster(ml::Classifier classifier, Policy policy)
      : classifier_(std::move(classifier)), policy_(std::move(policy)) {}

  // Classifies the newest record of each flow seen since the previous
  // epoch and writes only priorities that differ from the switch's.
  // Returns the number of register writes. Per-flow failures are recorded
  // in errors() and skipped.
  size_t ControlLoop(const Dataset& dataset, SwitchControl& control, SimTime now);

  const AdjustmentLog& log() const { return log_; }
  const std::vector<std::string>& errors() const { return errors_; }
  const Policy& policy() const { return policy_; }
  const ml::Classifier& classifier() const { return classifier_; }

 private:
  ml::Classifier classifier_;
  Policy policy_;
  AdjustmentLog log_;
  std::vector<std::string> errors_;
  size_t cursor_ = 0;
};

}  // namespace sanet

#endif  // SANET_ADJUSTER_H
