#include "sanet/qoe.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ini.h"
#include "sanet/error.h"

namespace sanet {

std::vector<FlowStats> Accumulate(std::span<const DeliveryEvent> events, SimTime window) {
  std::map<FlowKey, FlowStats> by_flow;
  std::map<FlowKey, std::vector<uint64_t>> latencies;
  for (const auto& e : events) {
    FlowStats& s = by_flow[e.key];
    s.flow = e.key;
    switch (e.kind) {
      case DeliveryEvent::Kind::kSent:
        ++s.sent;
        break;
      case DeliveryEvent::Kind::kDropped:
        ++s.dropped;
        break;
      case DeliveryEvent::Kind::kDelivered:
        ++s.delivered;
        s.delivered_bytes += e.size_bytes;
        latencies[e.key].push_back((e.time - e.created_at).ticks());
        break;
    }
  }

  std::vector<FlowStats> out;
  out.reserve(by_flow.size());
  for (auto& [key, s] : by_flow) {
    if (window.ticks() > 0) {
      s.throughput_bps = static_cast<double>(s.delivered_bytes) * 8.0 * 1e6 /
                         static_cast<double>(window.ticks());
    }
    auto& lat = latencies[key];
    if (!lat.empty()) {
      std::sort(lat.begin(), lat.end());
      uint64_t sum = 0;
      for (uint64_t v : lat) sum += v;
      s.mean_latency_us = static_cast<double>(sum) / static_cast<double>(lat.size());
      size_t rank = (99 * lat.size() + 99) / 100;
      s.p99_latency_us = static_cast<double>(lat[rank - 1]);
    }
    out.push_back(s);
  }
  return out;
}

void WriteFlowStatsCsv(std::ostream& out, std::span<const FlowStats> stats) {
  out << "src_ip,dst_ip,src_port,dst_port,protocol,sent,delivered,dropped,"
         "delivered_bytes,throughput_bps,mean_latency_us,p99_latency_us\n";
  char nums[128];
  for (const auto& s : stats) {
    std::snprintf(nums, sizeof(nums), "%.3f,%.3f,%.3f", s.throughput_bps,
                  s.mean_latency_us, s.p99_latency_us);
    out << FormatIpv4(s.flow.src_ip) << ',' << FormatIpv4(s.flow.dst_ip) << ','
        << s.flow.src_port << ',' << s.flow.dst_port << ','
        << static_cast<unsigned>(s.flow.protocol) << ',' << s.sent << ','
        << s.delivered << ',' << s.dropped << ',' << s.delivered_bytes << ',' << nums
        << '\n';
  }
}

void FrameLedger::Expect(uint64_t frame_seq, SimTime emitted) {
  FrameRecord& f = frames_[frame_seq];
  ++f.expected;
  f.first_emission = std::min(f.first_emission, emitted);
}

void FrameLedger::Deliver(uint64_t frame_seq, SimTime arrival) {
  auto it = frames_.find(frame_seq);
  if (it == frames_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "delivery for unknown frame " + std::to_string(frame_seq));
  }
  FrameRecord& f = it->second;
  if (f.delivered == f.expected) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame " + std::to_string(frame_seq) + " over-delivered");
  }
  ++f.delivered;
  f.last_arrival = std::max(f.last_arrival, arrival);
}

size_t CompleteFrames(const FrameLedger& ledger, uint64_t deadline_us) {
  size_t complete = 0;
  for (const auto& [seq, f] : ledger.frames()) {
    if (f.delivered == f.expected &&
        f.last_arrival.ticks() - f.first_emission.ticks() <= deadline_us) {
      ++complete;
    }
  }
  return complete;
}

double DeliveredFps(const FrameLedger& ledger, double duration_s, uint64_t deadline_us) {
  if (!(duration_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  }
  return static_cast<double>(CompleteFrames(ledger, deadline_us)) / duration_s;
}

ImageMatrix::ImageMatrix(size_t rows, size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "image needs at least one row and column");
  }
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kInvalidArgument, "image value count does not match dimensions");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= kPixelPeak)) {
      throw Error(ErrorCode::kInvalidArgument, "pixel value outside [0, 255]");
    }
  }
}

ImageMatrix ImageMatrix::Filled(size_t rows, size_t cols, double value) {
  return ImageMatrix(rows, cols, std::vector<double>(rows * cols, value));
}

ImageMatrix ParseImageCsv(std::string_view text) {
  size_t cols = 0;
  size_t rows = 0;
  std::vector<double> values;
  try {
    for (std::string_view line : ini::SplitList(text, '\n')) {
      auto cells = ini::SplitList(line, ',');
      if (cells.empty()) continue;
      if (rows == 0) {
        cols = cells.size();
      } else if (cells.size() != cols) {
        throw Error(ErrorCode::kParseFailure,
                    "row " + std::to_string(rows + 1) + " has " +
                        std::to_string(cells.size()) + " values, expected " +
                        std::to_string(cols));
      }
      for (auto cell : cells) values.push_back(ini::ParseDouble(cell, "pixel"));
      ++rows;
    }
    if (rows == 0) throw Error(ErrorCode::kParseFailure, "image file is empty");
    return ImageMatrix(rows, cols, std::move(values));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseFailure) throw;
    throw Error(ErrorCode::kParseFailure, e.what());
  }
}

ImageMatrix LoadImageCsv(const std::string& path) {
  return ParseImageCsv(ini::ReadWholeFile(path));
}

double Mse(const ImageMatrix& f, const ImageMatrix& g) {
  if (f.rows() != g.rows() || f.cols() != g.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(f.rows()) + "x" + std::to_string(f.cols()) + " vs " +
                    std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
  }
  double sum = 0.0;
  const auto& a = f.values();
  const auto& b = g.values();
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

PsnrValue Psnr(const ImageMatrix& f, const ImageMatrix& g) {
  double mse = Mse(f, g);
  if (mse == 0.0) return PerfectMatch{};
  return 10.0 * std::log10(kPixelPeak * kPixelPeak / mse);
}

std::string FormatPsnr(const PsnrValue& value) {
  if (std::holds_alternative<PerfectMatch>(value)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", std::get<double>(value));
  return buf;
}

}  // namespace sanet
