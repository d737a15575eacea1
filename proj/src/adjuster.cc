#include "sanet/adjuster.h"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "ini.h"
#include "sanet/error.h"

namespace sanet {

void Policy::Validate(uint8_t num_priorities) const {
  for (const auto& [label, level] : class_priority) {
    if (level.level >= num_priorities) {
      throw Error(ErrorCode::kValueOutOfRange,
                  std::string(label.name()) + " maps to level " +
                      std::to_string(level.level) + " but the switch has " +
                      std::to_string(num_priorities) + " queues");
    }
  }
  for (const auto& [key, level] : flow_overrides) {
    if (level.level >= num_priorities) {
      throw Error(ErrorCode::kValueOutOfRange,
                  "override for " + key.ToString() + " exceeds queue count");
    }
  }
  if (epoch_us == 0) throw Error(ErrorCode::kConfigInvalid, "epoch_us must be > 0");
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "min_confidence must be in [0, 1]");
  }
}

namespace {

PriorityLevel ParseLevel(std::string_view text) {
  uint64_t v = ini::ParseUint(text, "priority level");
  if (v > UINT8_MAX) throw Error(ErrorCode::kConfigInvalid, "priority level too large");
  return PriorityLevel{static_cast<uint8_t>(v)};
}

FlowKey ParseFlowKey(std::string_view text) {
  auto parts = ini::SplitList(text);
  if (parts.size() != 5) {
    throw Error(ErrorCode::kConfigInvalid,
                "flow must be srcip,dstip,sport,dport,proto: '" + std::string(text) + "'");
  }
  try {
    return FlowKey::Make(ParseIpv4(parts[0]), ParseIpv4(parts[1]),
                         ini::ParseUint(parts[2], "src port"),
                         ini::ParseUint(parts[3], "dst port"),
                         ini::ParseUint(parts[4], "protocol"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
}

}  // namespace

Policy ParsePolicy(std::string_view text) {
  Policy policy;
  for (std::string_view line : ini::SplitList(text, '\n')) {
    if (size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = ini::Trim(line);
    if (line.empty()) continue;
    if (size_t arrow = line.find("->"); arrow != std::string_view::npos) {
      FlowKey key = ParseFlowKey(line.substr(0, arrow));
      policy.flow_overrides[key] = ParseLevel(line.substr(arrow + 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigInvalid,
                  "policy line '" + std::string(line) + "' is not 'key = value'");
    }
    std::string_view key = ini::Trim(line.substr(0, eq));
    std::string_view value = ini::Trim(line.substr(eq + 1));
    if (key == "epoch_us") {
      policy.epoch_us = ini::ParseUint(value, "epoch_us");
    } else if (key == "min_confidence") {
      policy.min_confidence = ini::ParseDouble(value, "min_confidence");
    } else {
      ClassLabel label;
      try {
        label = ClassLabel::FromName(key);
      } catch (const Error&) {
        throw Error(ErrorCode::kConfigInvalid,
                    "unknown policy key '" + std::string(key) + "'");
      }
      policy.class_priority[label] = ParseLevel(value);
    }
  }
  return policy;
}

Policy LoadPolicy(const std::string& path) {
  return ParsePolicy(ini::ReadWholeFile(path));
}

std::optional<PriorityLevel> Decide(const ml::Prediction& prediction,
                                    const FlowKey& key, const Policy& policy) {
  if (auto it = policy.flow_overrides.find(key); it != policy.flow_overrides.end()) {
    return it->second;
  }
  double top = *std::max_element(prediction.scores.begin(), prediction.scores.end());
  if (top < policy.min_confidence) return std::nullopt;
  if (auto it = policy.class_priority.find(prediction.label);
      it != policy.class_priority.end()) {
    return it->second;
  }
  return std::nullopt;
}

void AdjustmentLog::Append(AdjustmentEntry entry) {
  if (!entries_.empty() && entry.time < entries_.back().time) {
    throw Error(ErrorCode::kInvalidArgument, "adjustment log entries must be time-ordered");
  }
  entries_.push_back(entry);
}

void AdjustmentLog::WriteCsv(std::ostream& out) const {
  out << "time_us,flow_id,src_ip,dst_ip,src_port,dst_port,protocol,"
         "old_priority,new_priority,predicted_class,confidence\n";
  char confidence[32];
  for (const auto& e : entries_) {
    std::snprintf(confidence, sizeof(confidence), "%.6f", e.confidence);
    out << e.time.ticks() << ',' << e.flow_id.id << ',' << FormatIpv4(e.key.src_ip)
        << ',' << FormatIpv4(e.key.dst_ip) << ',' << e.key.src_port << ','
        << e.key.dst_port << ',' << static_cast<unsigned>(e.key.protocol) << ','
        << static_cast<unsigned>(e.old_priority.level) << ','
        << static_cast<unsigned>(e.new_priority.level) << ',' << e.predicted.name()
        << ',' << confidence << '\n';
  }
}

void Apply(FlowId flow_id, const FlowKey& key, PriorityLevel priority,
           SwitchControl& control, AdjustmentLog& log, SimTime now,
           const ml::Prediction& prediction) {
  PriorityLevel old = control.ReadPriority(flow_id);
  control.WriteRegister(RegisterName::kPrioReg, flow_id, priority.level);
  AdjustmentEntry entry;
  entry.time = now;
  entry.flow_id = flow_id;
  entry.key = key;
  entry.old_priority = old;
  entry.new_priority = priority;
  entry.predicted = prediction.label;
  entry.confidence = prediction.scores[prediction.label.class_no()];
  log.Append(entry);
}

void SetMirroring(SwitchControl& control, bool flag, uint64_t interval_us) {
  control.WriteRegister(RegisterName::kMirrorInterval, std::nullopt, interval_us);
  control.WriteRegister(RegisterName::kMirrorFlag, std::nullopt, flag ? 1 : 0);
}

size_t Adjuster::ControlLoop(const Dataset& dataset, SwitchControl& control,
                             SimTime now) {
  const auto& records = dataset.records();
  std::map<FlowKey, size_t> newest;
  for (size_t i = cursor_; i < records.size(); ++i) newest[records[i].key()] = i;
  cursor_ = records.size();

  size_t writes = 0;
  for (const auto& [key, index] : newest) {
    try {
      ml::Prediction prediction = classifier_.Predict(ml::Featurize(records[index]));
      std::optional<PriorityLevel> desired = Decide(prediction, key, policy_);
      if (!desired) continue;
      std::optional<FlowId> id = control.FindFlow(key);
      if (!id) {
        errors_.push_back("t=" + std::to_string(now.ticks()) + " flow " +
                          key.ToString() + " unknown to the switch");
        continue;
      }
      if (control.ReadPriority(*id) == *desired) continue;
      Apply(*id, key, *desired, control, log_, now, prediction);
      ++writes;
    } catch (const Error& e) {
      errors_.push_back("t=" + std::to_string(now.ticks()) + " flow " +
                        key.ToString() + ": " + e.what());
    }
  }
  return writes;
}

}  // namespace sanet
