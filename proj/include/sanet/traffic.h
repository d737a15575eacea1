#ifndef SANET_TRAFFIC_H
#define SANET_TRAFFIC_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sanet/model.h"
#include "sanet/telemetry.h"

namespace sanet {

// Constant-bit-rate source.
struct CbrSpec {
  FlowKey key;
  uint64_t rate_bps = 0;
  uint32_t packet_size_bytes = 1;
  SimTime start;
  SimTime duration;
  uint16_t ingress_port = 0;

  void Validate() const;
};

// Framed source: every 1/fps seconds a burst of packets_per_frame packets
// sharing one frame_seq.
struct VideoSpec {
  FlowKey key;
  uint32_t fps = 30;
  uint32_t packets_per_frame = 1;
  uint32_t packet_size_bytes = 1;
  SimTime start;
  SimTime duration;
  uint16_t ingress_port = 0;

  void Validate() const;
};

// Packet k departs at start + floor(k * size * 8e6 / rate) while inside
// [start, start + duration).
std::vector<Packet> GenerateCbr(const CbrSpec& spec);

// Frame k starts at start + floor(k * 1e6 / fps).
std::vector<Packet> GenerateVideo(const VideoSpec& spec);

// Paces rows onto a link: a row departs at the later of its own timestamp
// and the previous departure plus the previous row's serialization time.
// Throws kUnsortedTrace if timestamps decrease.
std::vector<Packet> ReplayTrace(std::span<const TraceRow> rows,
                                uint64_t link_rate_bps);

// Merges per-source streams by (created_at, source index, packet_seq) and
// renumbers packet_seq in global emission order.
std::vector<Packet> MergeStreams(std::vector<std::vector<Packet>> sources);

// Feature distribution for one class of the synthetic IoT trace.
struct IotClassProfile {
  ClassLabel label;
  std::vector<uint16_t> dst_ports;
  std::vector<uint32_t> src_ips;
  std::vector<uint32_t> dst_ips;
  uint16_t src_port_lo = 1024;
  uint16_t src_port_hi = 65535;
  std::vector<uint8_t> protocols;
  uint32_t size_lo = 64;
  uint32_t size_hi = 1500;
  uint64_t mean_gap_us = 10'000;
  uint16_t ingress_port = 0;

  void Validate() const;
};

struct SyntheticTrace {
  std::vector<TraceRow> rows;      // rows carry their label
  std::vector<ClassLabel> labels;  // ground truth, parallel to rows
};

// Deterministic for a seed. Throws kOverlappingPortSets if two profiles
// share a destination port.
SyntheticTrace GenerateSyntheticIotTrace(
    std::span<const IotClassProfile> profiles, uint32_t packets_per_class,
    uint64_t seed);

// Profiles file: one INI section per class, "[class <Name>]", with keys
// dst_ports, src_ips, dst_ips, src_ports (lo-hi), protocols, sizes (lo-hi),
// mean_gap_us and ingress_port.
std::vector<IotClassProfile> LoadIotProfiles(const std::string& path);
std::vector<IotClassProfile> ParseIotProfiles(const std::string& text);

}  // namespace sanet

#endif  // SANET_TRAFFIC_H
