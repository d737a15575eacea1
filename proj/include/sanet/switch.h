#ifndef SANET_SWITCH_H
#define SANET_SWITCH_H

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sanet/model.h"
#include "sanet/telemetry.h"

namespace sanet {

struct SwitchConfig {
  uint32_t register_capacity = 1024;
  uint8_t num_priorities = 8;
  uint32_t queue_capacity_pkts = 64;
  uint64_t link_rate_bps = 2'000'000;
  uint16_t egress_port = 1;
  PriorityLevel default_priority{0};
  bool mirror_flag = false;
  uint64_t mirror_interval_us = 0;

  void Validate() const;
};

enum class RegisterName { kPrioReg, kMirrorFlag, kMirrorInterval };

// "prio_reg", "mirror_flag", "mirror_interval"; throws kUnknownRegister.
RegisterName ParseRegisterName(std::string_view name);

// Data-plane register state: flow table, per-flow priority and mirror timer,
// and the global mirror flag/interval.
class RegisterBank {
 public:
  RegisterBank(uint32_t capacity, uint8_t num_priorities,
               PriorityLevel default_priority = {});

  // Throws kCapacityExhausted when `key` is new and the bank is full.
  FlowId LookupOrAssign(const FlowKey& key);
  std::optional<FlowId> Find(const FlowKey& key) const;
  const FlowKey& KeyOf(FlowId id) const;

  PriorityLevel priority(FlowId id) const;
  std::optional<SimTime> last_seen(FlowId id) const;
  bool mirror_flag() const { return mirror_flag_; }
  uint64_t mirror_interval_us() const { return mirror_interval_us_; }

  // Timer-gated mirror decision; arms the flow's timer whenever it fires.
  bool ShouldMirror(FlowId id, SimTime now);

  // Throws kIndexOutOfRange (prio_reg index missing or unassigned) or
  // kValueOutOfRange.
  void Write(RegisterName name, std::optional<FlowId> index, uint64_t value);

  uint32_t size() const { return static_cast<uint32_t>(keys_.size()); }
  uint32_t capacity() const { return capacity_; }
  uint8_t num_priorities() const { return num_priorities_; }

 private:
  void CheckAssigned(FlowId id) const;

  uint32_t capacity_;
  uint8_t num_priorities_;
  PriorityLevel default_priority_;
  std::unordered_map<FlowKey, FlowId, FlowKeyHash> flow_ids_;
  std::vector<FlowKey> keys_;
  std::vector<PriorityLevel> prio_reg_;
  std::vector<std::optional<SimTime>> last_seen_;
  bool mirror_flag_ = false;
  uint64_t mirror_interval_us_ = 0;
};

struct SwitchPort {
  uint16_t port_no = 1;
  uint64_t link_rate_bps = 2'000'000;
  SimTime busy_until;
};

// A packet sitting in (or just leaving) a priority queue, with the metadata
// the ingress pipeline attached to it.
struct QueuedPacket {
  Packet packet;
  FlowId flow_id;
  PriorityLevel priority;
  SimTime ingress_time;
  SimTime enq_time;
  uint32_t enq_qdepth = 0;
  bool mirror = false;
};

struct EnqueueResult {
  bool accepted = false;
  uint32_t enq_qdepth = 0;
};

struct Dequeued {
  QueuedPacket item;
  uint32_t deq_qdepth = 0;
  uint64_t deq_timedelta = 0;
  SimTime egress_time;      // serialization starts
  SimTime egress_complete;  // last bit on the wire
};

// Strict non-preemptive priority over tail-drop FIFOs, highest index first.
class PriorityQueueBank {
 public:
  PriorityQueueBank(uint8_t num_levels, uint32_t capacity_pkts);

  // Sets enq_time and enq_qdepth on the stored copy.
  EnqueueResult Enqueue(QueuedPacket item, SimTime now);

  // Serves the head of the highest non-empty queue if the port is free at
  // `now`, and advances port.busy_until to the end of serialization.
  std::optional<Dequeued> DequeueNext(SwitchPort& port, SimTime now);

  uint8_t num_levels() const { return static_cast<uint8_t>(queues_.size()); }
  uint32_t capacity_pkts() const { return capacity_pkts_; }
  size_t occupancy(PriorityLevel level) const;
  size_t total_occupancy() const;
  uint64_t drops(PriorityLevel level) const;
  bool empty() const { return total_occupancy() == 0; }

 private:
  std::vector<std::deque<QueuedPacket>> queues_;
  std::vector<uint64_t> drops_;
  uint32_t capacity_pkts_;
};

// Egress telemetry for a dequeued packet processed at `now`. Throws
// kFieldOverflow if any value exceeds its width.
TelemetryRecord StampTelemetry(const QueuedPacket& item, uint64_t deq_qdepth,
                               uint64_t deq_timedelta, SimTime now);

// Receiver of cloned telemetry.
class TelemetrySink {
 public:
  virtual ~TelemetrySink() = default;
  virtual void Deliver(const TelemetryRecord& record) = 0;
};

// Control-plane view of a switch. Everything the adjuster may do goes
// through this interface.
class SwitchControl {
 public:
  virtual ~SwitchControl() = default;
  virtual std::optional<FlowId> FindFlow(const FlowKey& key) const = 0;
  virtual PriorityLevel ReadPriority(FlowId id) const = 0;
  virtual uint8_t num_priorities() const = 0;
  virtual void WriteRegister(RegisterName name, std::optional<FlowId> index,
                             uint64_t value) = 0;
  // Text verbs: set-priority <id> <level>, set-mirror-flag <on|off>,
  // set-mirror-interval <us>, dump-registers. Returns the reply text.
  virtual std::string Execute(std::string_view command) = 0;
};

struct FlowCounters {
  uint64_t injected = 0;
  uint64_t accepted = 0;
  uint64_t dropped = 0;
  uint64_t transmitted = 0;
};

struct MirrorCounters {
  uint64_t cloned = 0;
  uint64_t sink_unavailable = 0;
  uint64_t stamp_errors = 0;
  uint64_t sink_errors = 0;
};

struct IngressResult {
  FlowId flow_id;
  PriorityLevel priority;
  SimTime ingress_time;
  bool mirror = false;
};

struct ReceiveResult {
  IngressResult ingress;
  EnqueueResult enqueue;
};

struct Departure {
  Dequeued dequeued;
  std::optional<TelemetryRecord> record;  // set when the packet was stamped
  bool mirrored = false;
};

// Single-owner switch state machine: ingress, queueing, egress stamping and
// cloning. Control writes take effect for packets processed afterwards.
class Switch : public SwitchControl {
 public:
  explicit Switch(const SwitchConfig& config);

  void AttachCollector(TelemetrySink* sink) { sink_ = sink; }
  void DetachCollector() { sink_ = nullptr; }

  IngressResult Ingress(const Packet& packet, SimTime now);
  ReceiveResult Receive(const Packet& packet, SimTime now);

  // Egress for the next packet if the port is free at `now`.
  std::optional<Departure> Transmit(SimTime now);

  // Earliest time Transmit can emit a packet, if anything is queued.
  std::optional<SimTime> NextTransmitTime() const;

  std::optional<FlowId> FindFlow(const FlowKey& key) const override {
    return registers_.Find(key);
  }
  PriorityLevel ReadPriority(FlowId id) const override {
    return registers_.priority(id);
  }
  uint8_t num_priorities() const override { return registers_.num_priorities(); }
  void WriteRegister(RegisterName name, std::optional<FlowId> index,
                     uint64_t value) override;
  std::string Execute(std::string_view command) override;
  std::string DumpRegisters() const;

  const RegisterBank& registers() const { return registers_; }
  const PriorityQueueBank& queues() const { return queues_; }
  const SwitchPort& port() const { return port_; }
  const FlowCounters& counters(FlowId id) const;
  FlowCounters totals() const;
  const MirrorCounters& mirror_counters() const { return mirror_counters_; }

 private:
  SwitchConfig config_;
  RegisterBank registers_;
  PriorityQueueBank queues_;
  SwitchPort port_;
  TelemetrySink* sink_ = nullptr;
  std::vector<FlowCounters> counters_;
  MirrorCounters mirror_counters_;
};

}  // namespace sanet

#endif  // SANET_SWITCH_H
