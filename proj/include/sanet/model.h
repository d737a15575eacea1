#ifndef SANET_MODEL_H
#define SANET_MODEL_H

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sanet {

// Simulated time in microseconds since the start of a run. Arithmetic is
// checked: overflow and negative results throw kTimeOverflow.
class SimTime {
 public:
  constexpr SimTime() = default;
  constexpr explicit SimTime(uint64_t ticks) : ticks_(ticks) {}

  static constexpr SimTime Max() { return SimTime(UINT64_MAX); }
  static SimTime FromSeconds(double seconds);

  constexpr uint64_t ticks() const { return ticks_; }

  SimTime operator+(SimTime other) const;
  // Duration between two instants; throws if `other` is later than *this.
  SimTime operator-(SimTime other) const;
  SimTime& operator+=(SimTime other) { return *this = *this + other; }

  constexpr auto operator<=>(const SimTime&) const = default;

 private:
  uint64_t ticks_ = 0;
};

// Transmission time of `size_bytes` at `rate_bps`, rounded up to whole µs.
SimTime SerializationDelay(uint64_t size_bytes, uint64_t rate_bps);

// IPv4 5-tuple. Field types carry the bit widths; Make() is the checked
// constructor for values coming from wider integers.
struct FlowKey {
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  uint8_t protocol = 0;

  static FlowKey Make(uint64_t src_ip, uint64_t dst_ip, uint64_t src_port,
                      uint64_t dst_port, uint64_t protocol);

  constexpr auto operator<=>(const FlowKey&) const = default;

  std::string ToString() const;
};

struct FlowKeyHash {
  size_t operator()(const FlowKey& key) const;
};

// Index into the switch register arrays.
struct FlowId {
  uint32_t id = 0;
  constexpr auto operator<=>(const FlowId&) const = default;
};

// Priority queue index; 0 is the lowest priority.
struct PriorityLevel {
  uint8_t level = 0;
  constexpr auto operator<=>(const PriorityLevel&) const = default;
};

inline constexpr uint32_t kIngressPortLimit = 512;  // 9-bit port numbers

struct Packet {
  FlowKey key;
  uint32_t size_bytes = 1;
  SimTime created_at;
  uint16_t ingress_port = 0;
  std::optional<uint32_t> frame_seq;
  uint64_t packet_seq = 0;

  // Throws kInvalidArgument unless size_bytes >= 1 and ingress_port < 512.
  void Validate() const;
};

inline FlowKey FlowKeyOf(const Packet& packet) { return packet.key; }

// IoT device classes and their classifier numbering.
enum class IotClass : uint8_t {
  kEnergy = 0,
  kAppliances = 1,
  kHubs = 2,
  kHealthMonitors = 3,
  kCameras = 4,
  kOthers = 5,
};

inline constexpr size_t kNumClasses = 6;

class ClassLabel {
 public:
  constexpr ClassLabel() = default;
  constexpr explicit ClassLabel(IotClass cls) : cls_(cls) {}

  static ClassLabel FromNumber(uint64_t class_no);
  // Accepts the canonical names, e.g. "Health-Monitors".
  static ClassLabel FromName(std::string_view name);
  static constexpr ClassLabel Fallback() { return ClassLabel(IotClass::kOthers); }

  constexpr IotClass cls() const { return cls_; }
  constexpr uint8_t class_no() const { return static_cast<uint8_t>(cls_); }
  std::string_view name() const;

  constexpr auto operator<=>(const ClassLabel&) const = default;

 private:
  IotClass cls_ = IotClass::kOthers;
};

std::string_view ClassName(size_t class_no);

// Dotted-quad conversion, used only at configuration boundaries.
uint32_t ParseIpv4(std::string_view text);
std::string FormatIpv4(uint32_t address);

}  // namespace sanet

#endif  // SANET_MODEL_H
