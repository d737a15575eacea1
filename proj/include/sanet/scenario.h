#ifndef SANET_SCENARIO_H
#define SANET_SCENARIO_H

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sanet/adjuster.h"
#include "sanet/collector.h"
#include "sanet/ml/classifier.h"
#include "sanet/qoe.h"
#include "sanet/switch.h"
#include "sanet/traffic.h"

namespace sanet {

inline constexpr std::string_view kVersion = "0.1.0";

struct LinkSpec {
  uint64_t rate_bps = 100'000'000;
  uint64_t delay_us = 0;
};

// Senders hang off the programmable switch S1 (ingress ports 2, 3, ...;
// port 1 is the bottleneck towards S2). Receivers hang off S2.
struct HostSpec {
  std::string name;
  uint32_t ip = 0;
  uint16_t switch_port = 0;
};

struct TopologySpec {
  std::vector<HostSpec> senders;
  std::vector<HostSpec> receivers;
  LinkSpec access;
  LinkSpec bottleneck;
};

enum class SourceType { kCbr, kVideo, kTrace };

struct SourceSpec {
  std::string name;
  SourceType type = SourceType::kCbr;
  size_t sender = 0;    // index into topology.senders
  size_t receiver = 0;  // index into topology.receivers
  bool background = false;
  CbrSpec cbr;
  VideoSpec video;
  std::vector<TraceRow> trace;  // loaded at parse time
  uint64_t trace_rate_bps = 0;
};

enum class Arm { kBaseline, kCongested, kAdjusted };

// "baseline", "congested", "adjusted"; throws kConfigInvalid.
Arm ParseArm(std::string_view text);
std::string_view ArmName(Arm arm);

struct ScenarioConfig {
  std::string name = "scenario";
  uint64_t config_hash = 0;  // FNV-1a over the config and referenced files
  double duration_s = 60.0;
  uint64_t seed = 0;
  Arm arm = Arm::kAdjusted;
  std::string out_dir = "out";
  // 0 means two frame periods of each video source.
  uint64_t frame_deadline_us = 0;

  TopologySpec topology;
  SwitchConfig switch_config;
  std::vector<SourceSpec> sources;
  PortLabelMap labels;
  Policy policy;
  bool mirror_flag = true;
  uint64_t mirror_interval_us = 0;
  ml::TrainOptions train;
  std::optional<std::string> model_file;

  SimTime duration() const;
};

// Relative paths inside the config (policy, traces, model) resolve
// against base_dir. Everything is validated here, so a config that parses
// can be run. Throws kConfigInvalid.
ScenarioConfig ParseScenarioConfig(const std::string& text, const std::string& base_dir);
ScenarioConfig LoadScenarioConfig(const std::string& path);

uint64_t Fnv1a64(std::string_view bytes, uint64_t hash = 0xcbf29ce484222325ULL);

struct VideoResult {
  std::string source;
  FlowKey key;
  size_t frames = 0;
  size_t complete = 0;
  uint64_t deadline_us = 0;
  double delivered_fps = 0.0;
};

struct RunResult {
  Dataset dataset;
  AdjustmentLog log;
  std::vector<FlowStats> stats;
  std::vector<VideoResult> video;
  FlowCounters totals;
  MirrorCounters mirror;
  uint64_t end_time_us = 0;
  std::vector<std::string> errors;
};

struct ScenarioResult {
  Arm arm = Arm::kBaseline;
  RunResult run;
  // Adjusted arm only: the collection run's dataset and the model trained
  // on it (absent when a model file was supplied).
  std::optional<Dataset> training_set;
  std::optional<ml::Classifier> model;
};

// Runs the configured arm to completion. Baseline drops background
// sources; congested runs everything without control; adjusted first
// collects a labeled dataset from the congested traffic, trains the
// configured classifier on it, then reruns with the adjuster.
ScenarioResult RunScenario(const ScenarioConfig& config);

// Writes dataset.csv, adjustments.csv, stats.csv, report.json and, for the
// adjusted arm, training_dataset.csv and model.json. Returns the paths.
std::vector<std::string> WriteArtifacts(const ScenarioConfig& config,
                                        const ScenarioResult& result,
                                        const std::string& out_dir);

std::string ReproducibilityHeader(const ScenarioConfig& config);
std::string ReportJson(const ScenarioConfig& config, const ScenarioResult& result);

}  // namespace sanet

#endif  // SANET_SCENARIO_H
