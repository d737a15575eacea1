#include "sanet/traffic.h"

#include <algorithm>
#include <map>
#include <tuple>

#include "ini.h"
#include "sanet/error.h"
#include "sanet/rng.h"

namespace sanet {

namespace {

using u128 = unsigned __int128;

void CheckPort(uint16_t port) {
  if (port >= kIngressPortLimit) {
    throw Error(ErrorCode::kInvalidArgument, "ingress port exceeds 9 bits");
  }
}

}  // namespace

void CbrSpec::Validate() const {
  if (rate_bps == 0) throw Error(ErrorCode::kInvalidArgument, "CBR rate must be > 0");
  if (packet_size_bytes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "CBR packet size must be >= 1");
  }
  CheckPort(ingress_port);
  (void)(start + duration);
}

void VideoSpec::Validate() const {
  if (fps == 0) throw Error(ErrorCode::kInvalidArgument, "video fps must be >= 1");
  if (packets_per_frame == 0) {
    throw Error(ErrorCode::kInvalidArgument, "packets_per_frame must be >= 1");
  }
  if (packet_size_bytes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "video packet size must be >= 1");
  }
  CheckPort(ingress_port);
  (void)(start + duration);
}

std::vector<Packet> GenerateCbr(const CbrSpec& spec) {
  spec.Validate();
  std::vector<Packet> out;
  const u128 bits_us = static_cast<u128>(spec.packet_size_bytes) * 8u * 1'000'000u;
  for (uint64_t k = 0;; ++k) {
    u128 offset = bits_us * k / spec.rate_bps;
    if (offset >= spec.duration.ticks()) break;
    Packet p;
    p.key = spec.key;
    p.size_bytes = spec.packet_size_bytes;
    p.created_at = spec.start + SimTime(static_cast<uint64_t>(offset));
    p.ingress_port = spec.ingress_port;
    p.packet_seq = k;
    out.push_back(p);
  }
  return out;
}

std::vector<Packet> GenerateVideo(const VideoSpec& spec) {
  spec.Validate();
  std::vector<Packet> out;
  uint64_t seq = 0;
  for (uint64_t frame = 0;; ++frame) {
    u128 offset = static_cast<u128>(frame) * 1'000'000u / spec.fps;
    if (offset >= spec.duration.ticks()) break;
    if (frame > UINT32_MAX) {
      throw Error(ErrorCode::kValueOutOfRange, "frame sequence exceeds 32 bits");
    }
    SimTime at = spec.start + SimTime(static_cast<uint64_t>(offset));
    for (uint32_t i = 0; i < spec.packets_per_frame; ++i) {
      Packet p;
      p.key = spec.key;
      p.size_bytes = spec.packet_size_bytes;
      p.created_at = at;
      p.ingress_port = spec.ingress_port;
      p.frame_seq = static_cast<uint32_t>(frame);
      p.packet_seq = seq++;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Packet> ReplayTrace(std::span<const TraceRow> rows,
                                uint64_t link_rate_bps) {
  if (link_rate_bps == 0) {
    throw Error(ErrorCode::kInvalidArgument, "replay link rate must be > 0");
  }
  std::vector<Packet> out;
  out.reserve(rows.size());
  SimTime next_free;
  for (size_t i = 0; i < rows.size(); ++i) {
    const TraceRow& row = rows[i];
    if (i > 0 && row.timestamp_us < rows[i - 1].timestamp_us) {
      throw Error(ErrorCode::kUnsortedTrace,
                  "row " + std::to_string(i) + " goes back in time");
    }
    row.Validate();
    Packet p;
    p.key = row.key();
    p.size_bytes = row.size_bytes;
    p.created_at = std::max(SimTime(row.timestamp_us), next_free);
    p.ingress_port = row.ingress_port;
    p.packet_seq = i;
    next_free = p.created_at + SerializationDelay(p.size_bytes, link_rate_bps);
    out.push_back(p);
  }
  return out;
}

std::vector<Packet> MergeStreams(std::vector<std::vector<Packet>> sources) {
  struct Tagged {
    size_t source;
    Packet packet;
  };
  std::vector<Tagged> all;
  for (size_t s = 0; s < sources.size(); ++s) {
    for (auto& p : sources[s]) all.push_back({s, std::move(p)});
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    return std::tie(a.packet.created_at, a.source, a.packet.packet_seq) <
           std::tie(b.packet.created_at, b.source, b.packet.packet_seq);
  });
  std::vector<Packet> merged;
  merged.reserve(all.size());
  for (size_t i = 0; i < all.size(); ++i) {
    merged.push_back(std::move(all[i].packet));
    merged.back().packet_seq = i;
  }
  return merged;
}

void IotClassProfile::Validate() const {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument,
                "profile " + std::string(label.name()) + ": " + why);
  };
  if (dst_ports.empty()) fail("needs at least one destination port");
  if (src_ips.empty() || dst_ips.empty()) fail("needs source and destination IPs");
  if (protocols.empty()) fail("needs at least one protocol");
  if (src_port_lo > src_port_hi) fail("empty source port range");
  if (size_lo == 0 || size_lo > size_hi) fail("bad size range");
  if (mean_gap_us == 0) fail("mean gap must be > 0");
  CheckPort(ingress_port);
}

SyntheticTrace GenerateSyntheticIotTrace(
    std::span<const IotClassProfile> profiles, uint32_t packets_per_class,
    uint64_t seed) {
  std::map<uint16_t, ClassLabel> port_owner;
  for (const auto& profile : profiles) {
    profile.Validate();
    for (uint16_t port : profile.dst_ports) {
      auto [it, inserted] = port_owner.emplace(port, profile.label);
      if (!inserted && it->second != profile.label) {
        throw Error(ErrorCode::kOverlappingPortSets,
                    "port " + std::to_string(port) + " used by " +
                        std::string(it->second.name()) + " and " +
                        std::string(profile.label.name()));
      }
    }
  }

  struct Tagged {
    uint64_t timestamp;
    size_t source;
    uint32_t seq;
    TraceRow row;
  };
  std::vector<Tagged> all;
  all.reserve(profiles.size() * packets_per_class);
  for (size_t s = 0; s < profiles.size(); ++s) {
    const auto& profile = profiles[s];
    Rng rng(DeriveSeed(seed, s));
    uint64_t t = 0;
    for (uint32_t i = 0; i < packets_per_class; ++i) {
      t += UniformInRange(rng, 0, 2 * profile.mean_gap_us);
      TraceRow row;
      row.ingress_port = profile.ingress_port;
      row.protocol =
          profile.protocols[UniformIndex(rng, profile.protocols.size())];
      row.src_port = static_cast<uint16_t>(
          UniformInRange(rng, profile.src_port_lo, profile.src_port_hi));
      row.dst_port = profile.dst_ports[UniformIndex(rng, profile.dst_ports.size())];
      row.src_ip = profile.src_ips[UniformIndex(rng, profile.src_ips.size())];
      row.dst_ip = profile.dst_ips[UniformIndex(rng, profile.dst_ips.size())];
      row.size_bytes =
          static_cast<uint32_t>(UniformInRange(rng, profile.size_lo, profile.size_hi));
      row.timestamp_us = t;
      row.label = profile.label;
      all.push_back({t, s, i, row});
    }
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    return std::tie(a.timestamp, a.source, a.seq) <
           std::tie(b.timestamp, b.source, b.seq);
  });
  SyntheticTrace trace;
  trace.rows.reserve(all.size());
  trace.labels.reserve(all.size());
  for (auto& tagged : all) {
    trace.labels.push_back(*tagged.row.label);
    trace.rows.push_back(std::move(tagged.row));
  }
  return trace;
}

std::vector<IotClassProfile> ParseIotProfiles(const std::string& text) {
  ini::Tree tree = ini::Parse(text);
  std::vector<IotClassProfile> profiles;
  for (const auto& [name, section] : tree) {
    constexpr std::string_view kPrefix = "class ";
    if (name.rfind(kPrefix, 0) != 0) {
      throw Error(ErrorCode::kConfigInvalid, "unexpected section [" + name + "]");
    }
    IotClassProfile p;
    try {
      p.label = ClassLabel::FromName(ini::Trim(std::string_view(name).substr(kPrefix.size())));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigInvalid, e.what());
    }
    for (uint64_t port : ini::ParseUintList(ini::Require(section, "dst_ports", name),
                                            "dst_ports")) {
      if (port > UINT16_MAX) throw Error(ErrorCode::kConfigInvalid, "port > 65535");
      p.dst_ports.push_back(static_cast<uint16_t>(port));
    }
    p.src_ips = ini::ParseIpList(ini::Require(section, "src_ips", name));
    p.dst_ips = ini::ParseIpList(ini::Require(section, "dst_ips", name));
    if (auto ports = ini::Get(section, "src_ports")) {
      auto [lo, hi] = ini::ParseRange(*ports, "src_ports");
      if (hi > UINT16_MAX) throw Error(ErrorCode::kConfigInvalid, "port > 65535");
      p.src_port_lo = static_cast<uint16_t>(lo);
      p.src_port_hi = static_cast<uint16_t>(hi);
    }
    for (uint64_t proto :
         ini::ParseUintList(ini::Require(section, "protocols", name), "protocols")) {
      if (proto > UINT8_MAX) throw Error(ErrorCode::kConfigInvalid, "protocol > 255");
      p.protocols.push_back(static_cast<uint8_t>(proto));
    }
    if (auto sizes = ini::Get(section, "sizes")) {
      auto [lo, hi] = ini::ParseRange(*sizes, "sizes");
      if (hi > UINT32_MAX) throw Error(ErrorCode::kConfigInvalid, "size too large");
      p.size_lo = static_cast<uint32_t>(lo);
      p.size_hi = static_cast<uint32_t>(hi);
    }
    if (auto gap = ini::Get(section, "mean_gap_us")) {
      p.mean_gap_us = ini::ParseUint(*gap, "mean_gap_us");
    }
    if (auto port = ini::Get(section, "ingress_port")) {
      uint64_t v = ini::ParseUint(*port, "ingress_port");
      if (v >= kIngressPortLimit) {
        throw Error(ErrorCode::kConfigInvalid, "ingress_port exceeds 9 bits");
      }
      p.ingress_port = static_cast<uint16_t>(v);
    }
    try {
      p.Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigInvalid, e.what());
    }
    profiles.push_back(std::move(p));
  }
  if (profiles.empty()) throw Error(ErrorCode::kConfigInvalid, "no class profiles");
  return profiles;
}

std::vector<IotClassProfile> LoadIotProfiles(const std::string& path) {
  return ParseIotProfiles(ini::ReadWholeFile(path));
}

}  // namespace sanet
