#ifndef SANET_COLLECTOR_H
#define SANET_COLLECTOR_H

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sanet/model.h"
#include "sanet/switch.h"
#include "sanet/telemetry.h"

namespace sanet {

struct IotClassProfile;

// Labels records by destination port. Explicit per-flow overrides take
// precedence; unmatched ports fall back to Others.
class PortLabelMap {
 public:
  // Throws kOverlappingPortSets if a port is already claimed by another class.
  void Add(ClassLabel label, std::span<const uint16_t> ports);
  void AddFlowOverride(const FlowKey& key, ClassLabel label);

  ClassLabel Label(const TelemetryRecord& record) const;
  ClassLabel fallback() const { return ClassLabel::Fallback(); }

  const std::map<uint16_t, ClassLabel>& ports() const { return ports_; }
  const std::map<FlowKey, ClassLabel>& flow_overrides() const { return overrides_; }

  static PortLabelMap FromProfiles(std::span<const IotClassProfile> profiles);

 private:
  std::map<uint16_t, ClassLabel> ports_;
  std::map<FlowKey, ClassLabel> overrides_;
};

inline constexpr int kSchemaVersion = 1;

struct Provenance {
  std::string run_id = "unnamed";
  uint64_t created_us = 0;  // simulated time at which the dataset was sealed
  int schema_version = kSchemaVersion;
  // Extra reproducibility fields (config hash, seed, version), written as
  // key=value tokens in the second header line.
  std::vector<std::pair<std::string, std::string>> extra;

  bool operator==(const Provenance&) const = default;
};

// Append-only store of labeled telemetry.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Provenance provenance);

  // Throws kMissingLabel for unlabeled records.
  void Append(TelemetryRecord record);

  const std::vector<TelemetryRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const Provenance& provenance() const { return provenance_; }
  void set_created_us(uint64_t t) { provenance_.created_us = t; }

  bool operator==(const Dataset&) const = default;

 private:
  Provenance provenance_;
  std::vector<TelemetryRecord> records_;
};

// In-process endpoint for cloned telemetry.
class Collector : public TelemetrySink {
 public:
  Collector(PortLabelMap map, Provenance provenance)
      : map_(std::move(map)), dataset_(std::move(provenance)) {}

  ClassLabel Ingest(TelemetryRecord record);
  void Deliver(const TelemetryRecord& record) override { Ingest(record); }

  const Dataset& dataset() const { return dataset_; }
  Dataset& mutable_dataset() { return dataset_; }
  const PortLabelMap& label_map() const { return map_; }

 private:
  PortLabelMap map_;
  Dataset dataset_;
};

// File format: "# schema=1 run=<id>", "# created_us=<t> [key=value ...]",
// then the trace CSV with a label column. Returns rows written.
size_t WriteDataset(std::ostream& out, const Dataset& dataset);
size_t ExportDataset(const Dataset& dataset, const std::string& path);

// Throws kSchemaMismatch, kFieldOverflow, kMissingLabel, kIoFailure.
Dataset ReadDataset(std::istream& in);
Dataset ImportDataset(const std::string& path);

}  // namespace sanet

#endif  // SANET_COLLECTOR_H
