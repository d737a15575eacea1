#include "sanet/scenario.h"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ini.h"
#include "json.hpp"
#include "sanet/error.h"
#include "sanet/ml/features.h"

namespace sanet {

namespace fs = std::filesystem;

Arm ParseArm(std::string_view text) {
  if (text == "baseline") return Arm::kBaseline;
  if (text == "congested") return Arm::kCongested;
  if (text == "adjusted") return Arm::kAdjusted;
  throw Error(ErrorCode::kConfigInvalid,
              "unknown arm '" + std::string(text) + "' (baseline, congested, adjusted)");
}

std::string_view ArmName(Arm arm) {
  switch (arm) {
    case Arm::kBaseline: return "baseline";
    case Arm::kCongested: return "congested";
    case Arm::kAdjusted: return "adjusted";
  }
  return "?";
}

SimTime ScenarioConfig::duration() const { return SimTime::FromSeconds(duration_s); }

uint64_t Fnv1a64(std::string_view bytes, uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

std::string Resolve(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

template <typename T>
T ParseBounded(const ini::Tree& section, const std::string& key, T fallback,
               uint64_t max, std::string_view section_name) {
  auto text = ini::Get(section, key);
  if (!text) return fallback;
  uint64_t v = ini::ParseUint(*text, key);
  if (v > max) {
    throw Error(ErrorCode::kConfigInvalid, "[" + std::string(section_name) + "] " + key +
                                               " exceeds " + std::to_string(max));
  }
  return static_cast<T>(v);
}

double ParseSeconds(const ini::Tree& section, const std::string& key, double fallback) {
  auto text = ini::Get(section, key);
  if (!text) return fallback;
  double v = ini::ParseDouble(*text, key);
  if (v < 0.0) throw Error(ErrorCode::kConfigInvalid, key + " must be >= 0");
  return v;
}

std::vector<HostSpec> ParseHosts(std::string_view text, uint16_t first_port) {
  std::vector<HostSpec> hosts;
  for (std::string_view item : ini::SplitList(text)) {
    size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigInvalid,
                  "host entry '" + std::string(item) + "' is not name=ip");
    }
    HostSpec h;
    h.name = std::string(ini::Trim(item.substr(0, eq)));
    try {
      h.ip = ParseIpv4(ini::Trim(item.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigInvalid, e.what());
    }
    h.switch_port = static_cast<uint16_t>(first_port + hosts.size());
    hosts.push_back(h);
  }
  return hosts;
}

size_t FindHost(const std::vector<HostSpec>& hosts, const std::string& name,
                std::string_view role, const std::string& source) {
  for (size_t i = 0; i < hosts.size(); ++i) {
    if (hosts[i].name == name) return i;
  }
  throw Error(ErrorCode::kConfigInvalid, "source '" + source + "': '" + name +
                                             "' is not a " + std::string(role) + " host");
}

LinkSpec ParseLink(const ini::Tree& section, const std::string& prefix, LinkSpec fallback) {
  LinkSpec link = fallback;
  if (auto v = ini::Get(section, prefix + "_bps")) link.rate_bps = ini::ParseUint(*v, prefix);
  if (auto v = ini::Get(section, prefix + "_delay_us")) {
    link.delay_us = ini::ParseUint(*v, prefix + "_delay_us");
  }
  if (link.rate_bps == 0) {
    throw Error(ErrorCode::kConfigInvalid, prefix + "_bps must be > 0");
  }
  return link;
}

FlowKey ParseFlowKeyText(std::string_view text) {
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

SourceSpec ParseSource(const std::string& name, const ini::Tree& s,
                       const ScenarioConfig& config, const std::string& base_dir,
                       uint64_t& hash) {
  const std::string section = "source " + name;
  SourceSpec src;
  src.name = name;
  std::string type = ini::Require(s, "type", section);
  if (type == "cbr") {
    src.type = SourceType::kCbr;
  } else if (type == "video") {
    src.type = SourceType::kVideo;
  } else if (type == "trace") {
    src.type = SourceType::kTrace;
  } else {
    throw Error(ErrorCode::kConfigInvalid,
                "[" + section + "] unknown type '" + type + "' (cbr, video, trace)");
  }
  const TopologySpec& topo = config.topology;
  src.sender = FindHost(topo.senders, ini::Require(s, "from", section), "sender", name);
  src.receiver = FindHost(topo.receivers, ini::Require(s, "to", section), "receiver", name);
  if (auto v = ini::Get(s, "background")) src.background = ini::ParseBool(*v, "background");
  const HostSpec& from = topo.senders[src.sender];
  const HostSpec& to = topo.receivers[src.receiver];

  if (src.type == SourceType::kTrace) {
    std::string path = Resolve(base_dir, ini::Require(s, "file", section));
    hash = Fnv1a64(ini::ReadWholeFile(path), hash);
    src.trace = ReadTraceFile(path, LabelColumn::kOptional).rows;
    src.trace_rate_bps = ParseBounded<uint64_t>(s, "rate_bps", topo.access.rate_bps,
                                                UINT64_MAX, section);
    if (src.trace_rate_bps == 0) throw Error(ErrorCode::kConfigInvalid, "rate_bps must be > 0");
    for (size_t i = 1; i < src.trace.size(); ++i) {
      if (src.trace[i].timestamp_us < src.trace[i - 1].timestamp_us) {
        throw Error(ErrorCode::kConfigInvalid, "trace '" + path + "' is not time-sorted");
      }
    }
    return src;
  }

  FlowKey key = FlowKey::Make(
      from.ip, to.ip, ParseBounded<uint16_t>(s, "src_port", 0, UINT16_MAX, section),
      ParseBounded<uint16_t>(s, "dst_port", 0, UINT16_MAX, section),
      ParseBounded<uint8_t>(s, "protocol", 17, UINT8_MAX, section));
  double start_s = ParseSeconds(s, "start_s", 0.0);
  double duration_s = ParseSeconds(s, "duration_s", std::max(0.0, config.duration_s - start_s));
  uint32_t size = ParseBounded<uint32_t>(s, "packet_size", 1000, UINT32_MAX, section);

  if (src.type == SourceType::kCbr) {
    src.cbr.key = key;
    src.cbr.rate_bps = ini::ParseUint(ini::Require(s, "rate_bps", section), "rate_bps");
    src.cbr.packet_size_bytes = size;
    src.cbr.start = SimTime::FromSeconds(start_s);
    src.cbr.duration = SimTime::FromSeconds(duration_s);
    src.cbr.ingress_port = from.switch_port;
    src.cbr.Validate();
  } else {
    src.video.key = key;
    src.video.fps = ParseBounded<uint32_t>(s, "fps", 30, UINT32_MAX, section);
    src.video.packets_per_frame =
        ParseBounded<uint32_t>(s, "packets_per_frame", 1, UINT32_MAX, section);
    src.video.packet_size_bytes = size;
    src.video.start = SimTime::FromSeconds(start_s);
    src.video.duration = SimTime::FromSeconds(duration_s);
    src.video.ingress_port = from.switch_port;
    src.video.Validate();
  }
  return src;
}

const std::vector<std::string> kKnownSections = {"run",    "topology", "switch",
                                                 "labels", "label_overrides",
                                                 "policy", "mirror",   "ml"};

}  // namespace

ScenarioConfig ParseScenarioConfig(const std::string& text, const std::string& base_dir) {
  ScenarioConfig c;
  uint64_t hash = Fnv1a64(text);
  try {
    ini::Tree tree = ini::Parse(text);
    const ini::Tree empty;
    auto section = [&](const std::string& name) -> const ini::Tree& {
      auto child = tree.get_child_optional(ini::Tree::path_type(name, '\0'));
      return child ? *child : empty;
    };
    for (const auto& [name, unused] : tree) {
      bool known = std::find(kKnownSections.begin(), kKnownSections.end(), name) !=
                       kKnownSections.end() ||
                   name.rfind("source ", 0) == 0;
      if (!known) throw Error(ErrorCode::kConfigInvalid, "unknown section [" + name + "]");
    }

    const ini::Tree& run = section("run");
    if (auto v = ini::Get(run, "name")) c.name = *v;
    c.duration_s = ParseSeconds(run, "duration_s", c.duration_s);
    if (!(c.duration_s > 0.0)) throw Error(ErrorCode::kConfigInvalid, "duration_s must be > 0");
    c.seed = ini::ParseUint(ini::Require(run, "seed", "run"), "seed");
    if (auto v = ini::Get(run, "arm")) c.arm = ParseArm(*v);
    if (auto v = ini::Get(run, "out_dir")) c.out_dir = *v;
    if (auto v = ini::Get(run, "frame_deadline_us")) {
      c.frame_deadline_us = ini::ParseUint(*v, "frame_deadline_us");
    }

    const ini::Tree& topo = section("topology");
    c.topology.senders = ParseHosts(ini::Require(topo, "senders", "topology"), 2);
    c.topology.receivers = ParseHosts(ini::Require(topo, "receivers", "topology"), 2);
    if (c.topology.senders.empty() || c.topology.receivers.empty()) {
      throw Error(ErrorCode::kConfigInvalid, "topology needs senders and receivers");
    }
    if (c.topology.senders.size() + 2 > kIngressPortLimit) {
      throw Error(ErrorCode::kConfigInvalid, "too many senders for 9-bit port numbers");
    }
    c.topology.access = ParseLink(topo, "access", LinkSpec{});
    c.topology.bottleneck = ParseLink(topo, "bottleneck", LinkSpec{2'000'000, 0});

    const ini::Tree& sw = section("switch");
    SwitchConfig& s = c.switch_config;
    s.register_capacity =
        ParseBounded<uint32_t>(sw, "register_capacity", s.register_capacity, UINT32_MAX, "switch");
    s.num_priorities = ParseBounded<uint8_t>(sw, "priorities", s.num_priorities, 255, "switch");
    s.queue_capacity_pkts = ParseBounded<uint32_t>(sw, "queue_capacity_pkts",
                                                   s.queue_capacity_pkts, UINT32_MAX, "switch");
    s.default_priority.level =
        ParseBounded<uint8_t>(sw, "default_priority", s.default_priority.level, 255, "switch");
    s.link_rate_bps = c.topology.bottleneck.rate_bps;
    s.egress_port = 1;

    const ini::Tree& mirror = section("mirror");
    if (auto v = ini::Get(mirror, "flag")) c.mirror_flag = ini::ParseBool(*v, "mirror flag");
    if (auto v = ini::Get(mirror, "interval_us")) {
      c.mirror_interval_us = ini::ParseUint(*v, "mirror interval_us");
    }
    s.mirror_flag = c.mirror_flag;
    s.mirror_interval_us = c.mirror_interval_us;
    s.Validate();

    for (const auto& [name, body] : tree) {
      if (name.rfind("source ", 0) != 0) continue;
      c.sources.push_back(ParseSource(std::string(ini::Trim(name.substr(7))), body, c,
                                      base_dir, hash));
    }
    if (c.sources.empty()) throw Error(ErrorCode::kConfigInvalid, "no [source ...] sections");
    std::map<FlowKey, std::string> owners;
    for (const auto& src : c.sources) {
      if (src.type == SourceType::kTrace) continue;
      const FlowKey& key = src.type == SourceType::kCbr ? src.cbr.key : src.video.key;
      if (auto [it, fresh] = owners.emplace(key, src.name); !fresh) {
        throw Error(ErrorCode::kConfigInvalid, "sources '" + it->second + "' and '" +
                                                   src.name + "' share a flow key");
      }
    }

    for (const auto& [name, value] : section("labels")) {
      ClassLabel label = ClassLabel::FromName(name);
      std::vector<uint16_t> ports;
      for (uint64_t p : ini::ParseUintList(value.data(), name)) {
        if (p > UINT16_MAX) throw Error(ErrorCode::kConfigInvalid, "port out of range");
        ports.push_back(static_cast<uint16_t>(p));
      }
      c.labels.Add(label, ports);
    }
    for (const auto& [name, value] : section("label_overrides")) {
      std::string_view v = value.data();
      size_t arrow = v.find("->");
      if (arrow == std::string_view::npos) {
        throw Error(ErrorCode::kConfigInvalid,
                    "label override '" + name + "' must be 'flow -> Class'");
      }
      c.labels.AddFlowOverride(ParseFlowKeyText(v.substr(0, arrow)),
                               ClassLabel::FromName(ini::Trim(v.substr(arrow + 2))));
    }

    const ini::Tree& policy = section("policy");
    if (auto file = ini::Get(policy, "file")) {
      std::string path = Resolve(base_dir, *file);
      std::string policy_text = ini::ReadWholeFile(path);
      hash = Fnv1a64(policy_text, hash);
      c.policy = ParsePolicy(policy_text);
    }
    c.policy.Validate(s.num_priorities);

    const ini::Tree& ml = section("ml");
    if (auto v = ini::Get(ml, "model")) c.train.kind = ml::ParseModelKind(*v);
    c.train.k = ParseBounded<uint32_t>(ml, "k", c.train.k, UINT32_MAX, "ml");
    c.train.n_trees = ParseBounded<uint32_t>(ml, "trees", c.train.n_trees, UINT32_MAX, "ml");
    c.train.features_per_split = ParseBounded<uint32_t>(
        ml, "features_per_split", c.train.features_per_split, ml::kNumFeatures, "ml");
    if (auto v = ini::Get(ml, "max_depth")) {
      c.train.tree.max_depth = static_cast<uint32_t>(ini::ParseUint(*v, "max_depth"));
    }
    if (auto v = ini::Get(ml, "model_file")) {
      c.model_file = Resolve(base_dir, *v);
      hash = Fnv1a64(ini::ReadWholeFile(*c.model_file), hash);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid || e.code() == ErrorCode::kIoFailure) throw;
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  c.train.seed = c.seed;
  c.config_hash = hash;
  return c;
}

ScenarioConfig LoadScenarioConfig(const std::string& path) {
  std::string base = fs::path(path).parent_path().string();
  return ParseScenarioConfig(ini::ReadWholeFile(path), base);
}

namespace {

std::string HexHash(uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
  return buf;
}

// A packet after its sender's access link.
struct Routed {
  Packet packet;
  size_t sender = 0;
  SimTime arrival;  // at S1
};

std::vector<Routed> BuildArrivals(const ScenarioConfig& c, bool include_background) {
  std::vector<std::vector<Packet>> streams;
  for (const auto& src : c.sources) {
    if (src.background && !include_background) continue;
    std::vector<Packet> packets;
    switch (src.type) {
      case SourceType::kCbr: packets = GenerateCbr(src.cbr); break;
      case SourceType::kVideo: packets = GenerateVideo(src.video); break;
      case SourceType::kTrace: {
        packets = ReplayTrace(src.trace, src.trace_rate_bps);
        for (auto& p : packets) {
          p.ingress_port = c.topology.senders[src.sender].switch_port;
          p.frame_seq.reset();
        }
        break;
      }
    }
    streams.push_back(std::move(packets));
  }
  std::vector<Packet> merged = MergeStreams(std::move(streams));

  std::vector<SimTime> uplink_busy(c.topology.senders.size());
  std::vector<Routed> routed;
  routed.reserve(merged.size());
  const LinkSpec& access = c.topology.access;
  for (const Packet& p : merged) {
    Routed r;
    r.packet = p;
    r.sender = static_cast<size_t>(p.ingress_port - 2);
    SimTime start = std::max(p.created_at, uplink_busy[r.sender]);
    uplink_busy[r.sender] = start + SerializationDelay(p.size_bytes, access.rate_bps);
    r.arrival = uplink_busy[r.sender] + SimTime(access.delay_us);
    routed.push_back(std::move(r));
  }
  std::stable_sort(routed.begin(), routed.end(), [](const Routed& a, const Routed& b) {
    return a.arrival < b.arrival;
  });
  return routed;
}

RunResult Simulate(const ScenarioConfig& c, bool include_background, Adjuster* adjuster,
                   const std::string& run_id) {
  Provenance prov;
  prov.run_id = run_id;
  prov.extra = {{"arm", std::string(ArmName(c.arm))},
                {"config_hash", HexHash(c.config_hash)},
                {"seed", std::to_string(c.seed)},
                {"version", std::string(kVersion)}};

  Switch sw(c.switch_config);
  Collector collector(c.labels, prov);
  sw.AttachCollector(&collector);
  SetMirroring(sw, c.mirror_flag, c.mirror_interval_us);

  std::vector<Routed> arrivals = BuildArrivals(c, include_background);

  std::map<FlowKey, FrameLedger> ledgers;
  std::map<FlowKey, size_t> video_source;
  for (size_t i = 0; i < c.sources.size(); ++i) {
    const auto& src = c.sources[i];
    if (src.type != SourceType::kVideo || (src.background && !include_background)) continue;
    ledgers[src.video.key];
    video_source[src.video.key] = i;
  }

  std::vector<DeliveryEvent> events;
  events.reserve(arrivals.size() * 2);
  for (const auto& r : arrivals) {
    events.push_back({DeliveryEvent::Kind::kSent, r.packet.key, r.packet.created_at,
                      r.packet.created_at, r.packet.size_bytes});
    if (r.packet.frame_seq) {
      if (auto it = ledgers.find(r.packet.key); it != ledgers.end()) {
        it->second.Expect(*r.packet.frame_seq, r.packet.created_at);
      }
    }
  }

  const LinkSpec& access = c.topology.access;
  const LinkSpec& bottleneck = c.topology.bottleneck;
  std::vector<SimTime> downlink_busy(c.topology.receivers.size());
  const SimTime end = c.duration();
  const uint64_t epoch_us = c.policy.epoch_us;
  SimTime next_epoch = adjuster ? SimTime(epoch_us) : SimTime::Max();
  SimTime now;
  size_t next = 0;

  RunResult result;
  while (true) {
    SimTime t_epoch = next_epoch <= end ? next_epoch : SimTime::Max();
    SimTime t_arrival = next < arrivals.size() ? arrivals[next].arrival : SimTime::Max();
    SimTime t_transmit = SimTime::Max();
    if (auto t = sw.NextTransmitTime()) t_transmit = std::max(*t, now);
    if (t_epoch == SimTime::Max() && t_arrival == SimTime::Max() &&
        t_transmit == SimTime::Max()) {
      break;
    }

    if (t_epoch <= t_arrival && t_epoch <= t_transmit) {
      now = t_epoch;
      adjuster->ControlLoop(collector.dataset(), sw, now);
      next_epoch = next_epoch + SimTime(epoch_us);
      continue;
    }
    if (t_arrival <= t_transmit) {
      now = t_arrival;
      const Routed& r = arrivals[next++];
      ReceiveResult rx = sw.Receive(r.packet, now);
      if (!rx.enqueue.accepted) {
        events.push_back({DeliveryEvent::Kind::kDropped, r.packet.key, r.packet.created_at,
                          now, r.packet.size_bytes});
      }
      continue;
    }

    now = t_transmit;
    std::optional<Departure> dep = sw.Transmit(now);
    if (!dep) throw Error(ErrorCode::kInvalidArgument, "switch refused a scheduled transmit");
    const Packet& p = dep->dequeued.item.packet;
    SimTime at_s2 = dep->dequeued.egress_complete + SimTime(bottleneck.delay_us);
    SimTime delivered_at = at_s2;
    if (auto it = std::find_if(c.topology.receivers.begin(), c.topology.receivers.end(),
                               [&](const HostSpec& h) { return h.ip == p.key.dst_ip; });
        it != c.topology.receivers.end()) {
      SimTime& busy = downlink_busy[static_cast<size_t>(it - c.topology.receivers.begin())];
      busy = std::max(at_s2, busy) + SerializationDelay(p.size_bytes, access.rate_bps);
      delivered_at = busy + SimTime(access.delay_us);
    }
    events.push_back({DeliveryEvent::Kind::kDelivered, p.key, p.created_at, delivered_at,
                      p.size_bytes});
    if (p.frame_seq) {
      if (auto it = ledgers.find(p.key); it != ledgers.end()) {
        it->second.Deliver(*p.frame_seq, delivered_at);
      }
    }
  }

  result.end_time_us = std::max(now, end).ticks();
  collector.mutable_dataset().set_created_us(result.end_time_us);
  result.dataset = collector.dataset();
  result.stats = Accumulate(events, end);
  result.totals = sw.totals();
  result.mirror = sw.mirror_counters();
  if (adjuster) {
    result.log = adjuster->log();
    result.errors = adjuster->errors();
  }
  for (const auto& [key, ledger] : ledgers) {
    const SourceSpec& src = c.sources[video_source.at(key)];
    VideoResult v;
    v.source = src.name;
    v.key = key;
    v.frames = ledger.size();
    v.deadline_us = c.frame_deadline_us ? c.frame_deadline_us : 2 * 1'000'000 / src.video.fps;
    v.complete = CompleteFrames(ledger, v.deadline_us);
    v.delivered_fps = DeliveredFps(ledger, c.duration_s, v.deadline_us);
    result.video.push_back(v);
  }
  return result;
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw Error(ErrorCode::kIoFailure, "write to '" + path + "' failed");
}

}  // namespace

ScenarioResult RunScenario(const ScenarioConfig& config) {
  ScenarioResult result;
  result.arm = config.arm;
  const std::string run_id = config.name + "-" + std::string(ArmName(config.arm));
  switch (config.arm) {
    case Arm::kBaseline:
      result.run = Simulate(config, false, nullptr, run_id);
      break;
    case Arm::kCongested:
      result.run = Simulate(config, true, nullptr, run_id);
      break;
    case Arm::kAdjusted: {
      if (!config.mirror_flag) {
        throw Error(ErrorCode::kConfigInvalid, "the adjusted arm needs mirroring enabled");
      }
      std::optional<ml::Classifier> classifier;
      if (config.model_file) {
        classifier = ml::Classifier::Load(*config.model_file);
      } else {
        RunResult collection = Simulate(config, true, nullptr, config.name + "-collect");
        if (collection.dataset.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "collection run produced no telemetry");
        }
        std::vector<ml::Sample> samples = ml::ToSamples(collection.dataset.records());
        classifier = ml::Classifier::Train(samples, config.train);
        result.training_set = std::move(collection.dataset);
        result.model = classifier;
      }
      Adjuster adjuster(std::move(*classifier), config.policy);
      result.run = Simulate(config, true, &adjuster, run_id);
      break;
    }
  }
  return result;
}

std::string ReproducibilityHeader(const ScenarioConfig& config) {
  return "# version=" + std::string(kVersion) + " config_hash=" + HexHash(config.config_hash) +
         " seed=" + std::to_string(config.seed) + " arm=" + std::string(ArmName(config.arm)) +
         "\n";
}

std::string ReportJson(const ScenarioConfig& config, const ScenarioResult& result) {
  using nlohmann::ordered_json;
  const RunResult& run = result.run;
  ordered_json doc;
  doc["version"] = kVersion;
  doc["config_hash"] = HexHash(config.config_hash);
  doc["seed"] = config.seed;
  doc["name"] = config.name;
  doc["arm"] = ArmName(result.arm);
  doc["duration_s"] = config.duration_s;
  doc["end_time_us"] = run.end_time_us;
  ordered_json video = ordered_json::array();
  for (const auto& v : run.video) {
    video.push_back({{"source", v.source},
                     {"flow", v.key.ToString()},
                     {"frames", v.frames},
                     {"complete_frames", v.complete},
                     {"deadline_us", v.deadline_us},
                     {"delivered_fps", v.delivered_fps}});
  }
  doc["video"] = std::move(video);
  doc["switch"] = {{"injected", run.totals.injected},
                   {"accepted", run.totals.accepted},
                   {"dropped", run.totals.dropped},
                   {"transmitted", run.totals.transmitted}};
  doc["mirror"] = {{"cloned", run.mirror.cloned},
                   {"sink_unavailable", run.mirror.sink_unavailable},
                   {"stamp_errors", run.mirror.stamp_errors},
                   {"sink_errors", run.mirror.sink_errors}};
  doc["dataset_records"] = run.dataset.size();
  doc["register_writes"] = run.log.size();
  doc["adjuster_errors"] = run.errors;
  if (result.training_set) {
    doc["training"] = {{"model", ml::ModelKindName(config.train.kind)},
                       {"records", result.training_set->size()}};
  } else if (config.model_file && result.arm == Arm::kAdjusted) {
    doc["training"] = {{"model_file", *config.model_file}};
  }
  return doc.dump(2) + "\n";
}

std::vector<std::string> WriteArtifacts(const ScenarioConfig& config,
                                        const ScenarioResult& result,
                                        const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create '" + out_dir + "': " + ec.message());
  std::vector<std::string> written;
  auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  ExportDataset(result.run.dataset, path("dataset.csv"));
  written.push_back(path("dataset.csv"));

  std::ostringstream log;
  log << ReproducibilityHeader(config);
  result.run.log.WriteCsv(log);
  WriteTextFile(path("adjustments.csv"), log.str());
  written.push_back(path("adjustments.csv"));

  std::ostringstream stats;
  stats << ReproducibilityHeader(config);
  WriteFlowStatsCsv(stats, result.run.stats);
  WriteTextFile(path("stats.csv"), stats.str());
  written.push_back(path("stats.csv"));

  WriteTextFile(path("report.json"), ReportJson(config, result));
  written.push_back(path("report.json"));

  if (result.training_set) {
    ExportDataset(*result.training_set, path("training_dataset.csv"));
    written.push_back(path("training_dataset.csv"));
  }
  if (result.model) {
    result.model->Save(path("model.json"));
    written.push_back(path("model.json"));
  }
  return written;
}

}  // namespace sanet
