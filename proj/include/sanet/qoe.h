#ifndef SANET_QOE_H
#define SANET_QOE_H

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sanet/model.h"

namespace sanet {

struct DeliveryEvent {
  enum class Kind { kSent, kDelivered, kDropped };

  Kind kind = Kind::kSent;
  FlowKey key;
  SimTime created_at;
  SimTime time;  // when the event happened; arrival time for kDelivered
  uint32_t size_bytes = 0;
};

struct FlowStats {
  FlowKey flow;
  uint64_t sent = 0;
  uint64_t delivered = 0;
  uint64_t dropped = 0;
  uint64_t delivered_bytes = 0;
  double throughput_bps = 0.0;
  double mean_latency_us = 0.0;
  double p99_latency_us = 0.0;  // nearest rank
};

// Per-flow stats ordered by flow key. Throughput is delivered bits over
// `window` (0 when the window is empty).
std::vector<FlowStats> Accumulate(std::span<const DeliveryEvent> events, SimTime window);

void WriteFlowStatsCsv(std::ostream& out, std::span<const FlowStats> stats);

struct FrameRecord {
  uint32_t expected = 0;
  uint32_t delivered = 0;
  SimTime first_emission = SimTime::Max();
  SimTime last_arrival;
};

class FrameLedger {
 public:
  // One call per packet the source emits for `frame_seq`.
  void Expect(uint64_t frame_seq, SimTime emitted);
  // Throws kInvalidArgument for an unknown frame or more deliveries than
  // expected packets.
  void Deliver(uint64_t frame_seq, SimTime arrival);

  const std::map<uint64_t, FrameRecord>& frames() const { return frames_; }
  size_t size() const { return frames_.size(); }

 private:
  std::map<uint64_t, FrameRecord> frames_;
};

// Frames whose packets all arrived within deadline_us of the first
// emission, divided by duration_s. Throws kInvalidArgument if
// duration_s <= 0.
double DeliveredFps(const FrameLedger& ledger, double duration_s, uint64_t deadline_us);
size_t CompleteFrames(const FrameLedger& ledger, uint64_t deadline_us);

inline constexpr double kPixelPeak = 255.0;

class ImageMatrix {
 public:
  // Throws kInvalidArgument on empty dimensions, a size mismatch or an
  // entry outside [0, 255].
  ImageMatrix(size_t rows, size_t cols, std::vector<double> values);

  static ImageMatrix Filled(size_t rows, size_t cols, double value);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double at(size_t r, size_t c) const { return values_[r * cols_ + c]; }
  const std::vector<double>& values() const { return values_; }

 private:
  size_t rows_;
  size_t cols_;
  std::vector<double> values_;
};

// One row per line, values separated by commas. Throws kParseFailure.
ImageMatrix ParseImageCsv(std::string_view text);
ImageMatrix LoadImageCsv(const std::string& path);

struct PerfectMatch {
  bool operator==(const PerfectMatch&) const = default;
};
using PsnrValue = std::variant<PerfectMatch, double>;

// Both throw kDimensionMismatch.
double Mse(const ImageMatrix& f, const ImageMatrix& g);
PsnrValue Psnr(const ImageMatrix& f, const ImageMatrix& g);

// "inf" for PerfectMatch.
std::string FormatPsnr(const PsnrValue& value);

}  // namespace sanet

#endif  // SANET_QOE_H
