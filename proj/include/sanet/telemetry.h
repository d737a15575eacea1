#ifndef SANET_TELEMETRY_H
#define SANET_TELEMETRY_H

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sanet/model.h"

namespace sanet {

// Egress telemetry for one packet. The ten feature fields follow the
// dataset schema order; timestamp_us and size_bytes are row metadata that
// travel with the record but are never used as features.
struct TelemetryRecord {
  uint16_t ingress_port = 0;         // 9 bits
  uint64_t flow_interval_time = 0;   // 48 bits, µs from ingress to egress
  uint32_t enq_qdepth = 0;           // 19 bits, packets
  uint32_t deq_qdepth = 0;           // 19 bits, packets
  uint32_t deq_timedelta = 0;        // 32 bits, µs spent queued
  uint8_t protocol = 0;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;

  uint64_t timestamp_us = 0;
  uint32_t size_bytes = 1;
  std::optional<ClassLabel> label;

  FlowKey key() const {
    return FlowKey{src_ip, dst_ip, src_port, dst_port, protocol};
  }

  // Throws kFieldOverflow if a field exceeds its bit width.
  void Validate() const;

  bool operator==(const TelemetryRecord&) const = default;
};

// Trace rows share the record schema; replay ignores the queue fields.
using TraceRow = TelemetryRecord;

struct FeatureField {
  std::string_view column;
  unsigned bits;
};

inline constexpr std::array<FeatureField, 10> kFeatureFields = {{
    {"ingress_port", 9},
    {"flow_interval_time", 48},
    {"enq_qdepth", 19},
    {"deq_qdepth", 19},
    {"deq_timedelta", 32},
    {"protocol", 8},
    {"src_port", 16},
    {"dst_port", 16},
    {"src_ip", 32},
    {"dst_ip", 32},
}};

// Builds a record from raw (possibly too wide) values, rejecting any value
// that does not fit its width.
struct RawTelemetry {
  uint64_t ingress_port = 0;
  uint64_t flow_interval_time = 0;
  uint64_t enq_qdepth = 0;
  uint64_t deq_qdepth = 0;
  uint64_t deq_timedelta = 0;
  uint64_t protocol = 0;
  uint64_t src_port = 0;
  uint64_t dst_port = 0;
  uint64_t src_ip = 0;
  uint64_t dst_ip = 0;
};
TelemetryRecord MakeRecord(const RawTelemetry& raw);

// ---- Trace / dataset file format ------------------------------------------
//
// Comment lines start with '#'. The first non-comment line is the header:
// the ten feature columns, timestamp_us, size_bytes and optionally label.
// Columns may appear in any order on input; output always uses the order
// of kFeatureFields followed by timestamp_us,size_bytes[,label].

enum class LabelColumn { kOptional, kRequired, kOmit };

void WriteTraceCsv(std::ostream& out, const std::vector<std::string>& comments,
                   const std::vector<TelemetryRecord>& rows, bool with_label);

struct TraceFile {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<TelemetryRecord> rows;
  bool has_label_column = false;
};

// Throws kSchemaMismatch, kFieldOverflow, kMissingLabel or kParseFailure.
TraceFile ReadTraceCsv(std::istream& in, LabelColumn labels);

TraceFile ReadTraceFile(const std::string& path, LabelColumn labels);

}  // namespace sanet

#endif  // SANET_TELEMETRY_H
