#include "sanet/switch.h"

#include <charconv>
#include <sstream>

#include "sanet/error.h"

namespace sanet {

namespace {

constexpr uint64_t kMaxMirrorIntervalUs = (uint64_t{1} << 48) - 1;

std::vector<std::string_view> Words(std::string_view text) {
  std::vector<std::string_view> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

uint64_t ParseCommandNumber(std::string_view word) {
  uint64_t value = 0;
  auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || end != word.data() + word.size()) {
    throw Error(ErrorCode::kParseFailure,
                "expected a number, got '" + std::string(word) + "'");
  }
  return value;
}

}  // namespace

void SwitchConfig::Validate() const {
  if (register_capacity == 0) {
    throw Error(ErrorCode::kConfigInvalid, "register capacity must be >= 1");
  }
  if (num_priorities == 0) {
    throw Error(ErrorCode::kConfigInvalid, "need at least one priority queue");
  }
  if (queue_capacity_pkts == 0) {
    throw Error(ErrorCode::kConfigInvalid, "queue capacity must be >= 1");
  }
  if (link_rate_bps == 0) {
    throw Error(ErrorCode::kConfigInvalid, "link rate must be positive");
  }
  if (egress_port >= kIngressPortLimit) {
    throw Error(ErrorCode::kConfigInvalid, "egress port exceeds 9 bits");
  }
  if (default_priority.level >= num_priorities) {
    throw Error(ErrorCode::kConfigInvalid, "default priority out of range");
  }
  if (mirror_interval_us > kMaxMirrorIntervalUs) {
    throw Error(ErrorCode::kConfigInvalid, "mirror interval exceeds 48 bits");
  }
}

RegisterName ParseRegisterName(std::string_view name) {
  if (name == "prio_reg") return RegisterName::kPrioReg;
  if (name == "mirror_flag") return RegisterName::kMirrorFlag;
  if (name == "mirror_interval") return RegisterName::kMirrorInterval;
  throw Error(ErrorCode::kUnknownRegister,
              "no register named '" + std::string(name) + "'");
}

// ---- RegisterBank ----------------------------------------------------------

RegisterBank::RegisterBank(uint32_t capacity, uint8_t num_priorities,
                           PriorityLevel default_priority)
    : capacity_(capacity),
      num_priorities_(num_priorities),
      default_priority_(default_priority) {
  if (capacity == 0 || num_priorities == 0 ||
      default_priority.level >= num_priorities) {
    throw Error(ErrorCode::kInvalidArgument, "invalid register bank geometry");
  }
  keys_.reserve(capacity);
  prio_reg_.reserve(capacity);
  last_seen_.reserve(capacity);
}

FlowId RegisterBank::LookupOrAssign(const FlowKey& key) {
  if (auto it = flow_ids_.find(key); it != flow_ids_.end()) return it->second;
  if (keys_.size() >= capacity_) {
    throw Error(ErrorCode::kCapacityExhausted,
                "flow table full (" + std::to_string(capacity_) +
                    " flows), cannot admit " + key.ToString());
  }
  FlowId id{static_cast<uint32_t>(keys_.size())};
  flow_ids_.emplace(key, id);
  keys_.push_back(key);
  prio_reg_.push_back(default_priority_);
  last_seen_.emplace_back();
  return id;
}

std::optional<FlowId> RegisterBank::Find(const FlowKey& key) const {
  if (auto it = flow_ids_.find(key); it != flow_ids_.end()) return it->second;
  return std::nullopt;
}

void RegisterBank::CheckAssigned(FlowId id) const {
  if (id.id >= keys_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "flow id " + std::to_string(id.id) + " is not assigned (" +
                    std::to_string(keys_.size()) + " flows, capacity " +
                    std::to_string(capacity_) + ")");
  }
}

const FlowKey& RegisterBank::KeyOf(FlowId id) const {
  CheckAssigned(id);
  return keys_[id.id];
}

PriorityLevel RegisterBank::priority(FlowId id) const {
  CheckAssigned(id);
  return prio_reg_[id.id];
}

std::optional<SimTime> RegisterBank::last_seen(FlowId id) const {
  CheckAssigned(id);
  return last_seen_[id.id];
}

bool RegisterBank::ShouldMirror(FlowId id, SimTime now) {
  CheckAssigned(id);
  if (!mirror_flag_) return false;
  auto& last = last_seen_[id.id];
  if (mirror_interval_us_ > 0 && last) {
    if (now < *last || (now - *last).ticks() < mirror_interval_us_) return false;
  }
  last = now;
  return true;
}

void RegisterBank::Write(RegisterName name, std::optional<FlowId> index,
                         uint64_t value) {
  switch (name) {
    case RegisterName::kPrioReg:
      if (!index) {
        throw Error(ErrorCode::kIndexOutOfRange, "prio_reg write needs an index");
      }
      CheckAssigned(*index);
      if (value >= num_priorities_) {
        throw Error(ErrorCode::kValueOutOfRange,
                    "priority " + std::to_string(value) + " >= " +
                        std::to_string(num_priorities_) + " queues");
      }
      prio_reg_[index->id] = PriorityLevel{static_cast<uint8_t>(value)};
      return;
    case RegisterName::kMirrorFlag:
      if (value > 1) {
        throw Error(ErrorCode::kValueOutOfRange, "mirror_flag is a single bit");
      }
      mirror_flag_ = value == 1;
      return;
    case RegisterName::kMirrorInterval:
      if (value > kMaxMirrorIntervalUs) {
        throw Error(ErrorCode::kValueOutOfRange, "mirror interval exceeds 48 bits");
      }
      mirror_interval_us_ = value;
      return;
  }
}

// ---- PriorityQueueBank -----------------------------------------------------

PriorityQueueBank::PriorityQueueBank(uint8_t num_levels, uint32_t capacity_pkts)
    : queues_(num_levels), drops_(num_levels, 0), capacity_pkts_(capacity_pkts) {
  if (num_levels == 0 || capacity_pkts == 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid queue bank geometry");
  }
}

EnqueueResult PriorityQueueBank::Enqueue(QueuedPacket item, SimTime now) {
  if (item.priority.level >= queues_.size()) {
    throw Error(ErrorCode::kValueOutOfRange,
                "priority " + std::to_string(item.priority.level) +
                    " has no queue");
  }
  auto& queue = queues_[item.priority.level];
  if (queue.size() >= capacity_pkts_) {
    ++drops_[item.priority.level];
    return {false, static_cast<uint32_t>(queue.size())};
  }
  item.enq_time = now;
  item.enq_qdepth = static_cast<uint32_t>(queue.size());
  queue.push_back(std::move(item));
  return {true, queue.back().enq_qdepth};
}

std::optional<Dequeued> PriorityQueueBank::DequeueNext(SwitchPort& port,
                                                        SimTime now) {
  if (now < port.busy_until) return std::nullopt;
  for (size_t level = queues_.size(); level-- > 0;) {
    auto& queue = queues_[level];
    if (queue.empty()) continue;
    Dequeued out;
    out.deq_qdepth = static_cast<uint32_t>(queue.size());
    out.item = std::move(queue.front());
    queue.pop_front();
    out.deq_timedelta = (now - out.item.enq_time).ticks();
    out.egress_time = now;
    out.egress_complete =
        now + SerializationDelay(out.item.packet.size_bytes, port.link_rate_bps);
    port.busy_until = out.egress_complete;
    return out;
  }
  return std::nullopt;
}

size_t PriorityQueueBank::occupancy(PriorityLevel level) const {
  return queues_.at(level.level).size();
}

size_t PriorityQueueBank::total_occupancy() const {
  size_t total = 0;
  for (const auto& q : queues_) total += q.size();
  return total;
}

uint64_t PriorityQueueBank::drops(PriorityLevel level) const {
  return drops_.at(level.level);
}

// ---- Telemetry -------------------------------------------------------------

TelemetryRecord StampTelemetry(const QueuedPacket& item, uint64_t deq_qdepth,
                               uint64_t deq_timedelta, SimTime now) {
  const Packet& p = item.packet;
  RawTelemetry raw;
  raw.ingress_port = p.ingress_port;
  raw.flow_interval_time = (now - item.ingress_time).ticks();
  raw.enq_qdepth = item.enq_qdepth;
  raw.deq_qdepth = deq_qdepth;
  raw.deq_timedelta = deq_timedelta;
  raw.protocol = p.key.protocol;
  raw.src_port = p.key.src_port;
  raw.dst_port = p.key.dst_port;
  raw.src_ip = p.key.src_ip;
  raw.dst_ip = p.key.dst_ip;
  TelemetryRecord record = MakeRecord(raw);
  record.timestamp_us = now.ticks();
  record.size_bytes = p.size_bytes;
  return record;
}

// ---- Switch ----------------------------------------------------------------

Switch::Switch(const SwitchConfig& config)
    : config_((config.Validate(), config)),
      registers_(config.register_capacity, config.num_priorities,
                 config.default_priority),
      queues_(config.num_priorities, config.queue_capacity_pkts),
      port_{config.egress_port, config.link_rate_bps, SimTime()} {
  registers_.Write(RegisterName::kMirrorFlag, std::nullopt,
                   config.mirror_flag ? 1 : 0);
  registers_.Write(RegisterName::kMirrorInterval, std::nullopt,
                   config.mirror_interval_us);
}

IngressResult Switch::Ingress(const Packet& packet, SimTime now) {
  packet.Validate();
  IngressResult result;
  result.flow_id = registers_.LookupOrAssign(packet.key);
  if (counters_.size() <= result.flow_id.id) counters_.resize(result.flow_id.id + 1);
  result.priority = registers_.priority(result.flow_id);
  result.ingress_time = now;
  result.mirror = registers_.ShouldMirror(result.flow_id, now);
  return result;
}

ReceiveResult Switch::Receive(const Packet& packet, SimTime now) {
  ReceiveResult result;
  result.ingress = Ingress(packet, now);
  auto& counters = counters_[result.ingress.flow_id.id];
  ++counters.injected;

  QueuedPacket item;
  item.packet = packet;
  item.flow_id = result.ingress.flow_id;
  item.priority = result.ingress.priority;
  item.ingress_time = result.ingress.ingress_time;
  item.mirror = result.ingress.mirror;
  result.enqueue = queues_.Enqueue(std::move(item), now);
  if (result.enqueue.accepted) {
    ++counters.accepted;
  } else {
    ++counters.dropped;
  }
  return result;
}

std::optional<Departure> Switch::Transmit(SimTime now) {
  auto dequeued = queues_.DequeueNext(port_, now);
  if (!dequeued) return std::nullopt;
  ++counters_[dequeued->item.flow_id.id].transmitted;

  Departure departure;
  departure.dequeued = std::move(*dequeued);
  const Dequeued& d = departure.dequeued;
  try {
    departure.record = StampTelemetry(d.item, d.deq_qdepth, d.deq_timedelta, now);
  } catch (const Error&) {
    ++mirror_counters_.stamp_errors;
  }
  if (departure.record && d.item.mirror) {
    if (sink_ == nullptr) {
      ++mirror_counters_.sink_unavailable;
    } else {
      // Collector faults must never stall forwarding.
      try {
        sink_->Deliver(*departure.record);
        ++mirror_counters_.cloned;
        departure.mirrored = true;
      } catch (...) {
        ++mirror_counters_.sink_errors;
      }
    }
  }
  return departure;
}

std::optional<SimTime> Switch::NextTransmitTime() const {
  if (queues_.empty()) return std::nullopt;
  return port_.busy_until;
}

void Switch::WriteRegister(RegisterName name, std::optional<FlowId> index,
                           uint64_t value) {
  registers_.Write(name, index, value);
}

std::string Switch::Execute(std::string_view command) {
  auto words = Words(command);
  if (words.empty()) throw Error(ErrorCode::kParseFailure, "empty command");
  std::string_view verb = words[0];
  auto expect_args = [&](size_t n) {
    if (words.size() != n + 1) {
      throw Error(ErrorCode::kParseFailure,
                  std::string(verb) + " takes " + std::to_string(n) +
                      " argument(s)");
    }
  };
  if (verb == "set-priority") {
    expect_args(2);
    uint64_t id = ParseCommandNumber(words[1]);
    if (id > UINT32_MAX) {
      throw Error(ErrorCode::kIndexOutOfRange, "flow id too large");
    }
    WriteRegister(RegisterName::kPrioReg, FlowId{static_cast<uint32_t>(id)},
                  ParseCommandNumber(words[2]));
    return "ok";
  }
  if (verb == "set-mirror-flag") {
    expect_args(1);
    if (words[1] != "on" && words[1] != "off") {
      throw Error(ErrorCode::kValueOutOfRange, "mirror flag must be on or off");
    }
    WriteRegister(RegisterName::kMirrorFlag, std::nullopt, words[1] == "on");
    return "ok";
  }
  if (verb == "set-mirror-interval") {
    expect_args(1);
    WriteRegister(RegisterName::kMirrorInterval, std::nullopt,
                  ParseCommandNumber(words[1]));
    return "ok";
  }
  if (verb == "dump-registers") {
    expect_args(0);
    return DumpRegisters();
  }
  throw Error(ErrorCode::kParseFailure, "unknown verb '" + std::string(verb) + "'");
}

std::string Switch::DumpRegisters() const {
  std::ostringstream out;
  out << "mirror_flag=" << (registers_.mirror_flag() ? "on" : "off") << '\n'
      << "mirror_interval_us=" << registers_.mirror_interval_us() << '\n'
      << "flows=" << registers_.size() << " capacity=" << registers_.capacity()
      << '\n';
  for (uint32_t i = 0; i < registers_.size(); ++i) {
    FlowId id{i};
    out << "flow " << i << ' ' << registers_.KeyOf(id).ToString()
        << " prio=" << static_cast<unsigned>(registers_.priority(id).level)
        << " last_seen=";
    if (auto t = registers_.last_seen(id)) {
      out << t->ticks();
    } else {
      out << '-';
    }
    out << '\n';
  }
  return out.str();
}

const FlowCounters& Switch::counters(FlowId id) const {
  if (id.id >= counters_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "no counters for flow id");
  }
  return counters_[id.id];
}

FlowCounters Switch::totals() const {
  FlowCounters total;
  for (const auto& c : counters_) {
    total.injected += c.injected;
    total.accepted += c.accepted;
    total.dropped += c.dropped;
    total.transmitted += c.transmitted;
  }
  return total;
}

}  // namespace sanet
