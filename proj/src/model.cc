#include "sanet/model.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sanet/error.h"

namespace sanet {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTimeOverflow: return "TimeOverflow";
    case ErrorCode::kCapacityExhausted: return "CapacityExhausted";
    case ErrorCode::kFieldOverflow: return "FieldOverflow";
    case ErrorCode::kSinkUnavailable: return "SinkUnavailable";
    case ErrorCode::kUnknownRegister: return "UnknownRegister";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::kUnsortedTrace: return "UnsortedTrace";
    case ErrorCode::kOverlappingPortSets: return "OverlappingPortSets";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSingleClassOnly: return "SingleClassOnly";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

SimTime SimTime::FromSeconds(double seconds) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds) || seconds > 1.8e13) {
    throw Error(ErrorCode::kTimeOverflow, "seconds out of range");
  }
  return SimTime(static_cast<uint64_t>(std::llround(seconds * 1e6)));
}

SimTime SimTime::operator+(SimTime other) const {
  uint64_t sum = 0;
  if (__builtin_add_overflow(ticks_, other.ticks_, &sum)) {
    throw Error(ErrorCode::kTimeOverflow, "SimTime addition overflows");
  }
  return SimTime(sum);
}

SimTime SimTime::operator-(SimTime other) const {
  if (other.ticks_ > ticks_) {
    throw Error(ErrorCode::kTimeOverflow, "negative SimTime difference");
  }
  return SimTime(ticks_ - other.ticks_);
}

SimTime SerializationDelay(uint64_t size_bytes, uint64_t rate_bps) {
  if (rate_bps == 0) {
    throw Error(ErrorCode::kInvalidArgument, "link rate must be positive");
  }
  unsigned __int128 bits_us =
      static_cast<unsigned __int128>(size_bytes) * 8u * 1'000'000u;
  unsigned __int128 delay = (bits_us + rate_bps - 1) / rate_bps;
  if (delay > UINT64_MAX) {
    throw Error(ErrorCode::kTimeOverflow, "serialization delay overflows");
  }
  return SimTime(static_cast<uint64_t>(delay));
}

FlowKey FlowKey::Make(uint64_t src_ip, uint64_t dst_ip, uint64_t src_port,
                      uint64_t dst_port, uint64_t protocol) {
  if (src_ip > UINT32_MAX || dst_ip > UINT32_MAX) {
    throw Error(ErrorCode::kValueOutOfRange, "IPv4 address exceeds 32 bits");
  }
  if (src_port > UINT16_MAX || dst_port > UINT16_MAX) {
    throw Error(ErrorCode::kValueOutOfRange, "port exceeds 16 bits");
  }
  if (protocol > UINT8_MAX) {
    throw Error(ErrorCode::kValueOutOfRange, "protocol exceeds 8 bits");
  }
  return FlowKey{static_cast<uint32_t>(src_ip), static_cast<uint32_t>(dst_ip),
                 static_cast<uint16_t>(src_port),
                 static_cast<uint16_t>(dst_port),
                 static_cast<uint8_t>(protocol)};
}

std::string FlowKey::ToString() const {
  std::ostringstream out;
  out << FormatIpv4(src_ip) << ',' << FormatIpv4(dst_ip) << ',' << src_port
      << ',' << dst_port << ',' << static_cast<unsigned>(protocol);
  return out.str();
}

size_t FlowKeyHash::operator()(const FlowKey& key) const {
  uint64_t a = (static_cast<uint64_t>(key.src_ip) << 32) | key.dst_ip;
  uint64_t b = (static_cast<uint64_t>(key.src_port) << 24) |
               (static_cast<uint64_t>(key.dst_port) << 8) | key.protocol;
  uint64_t h = a * 0x9E3779B97F4A7C15ull;
  h ^= b + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
  return static_cast<size_t>(h ^ (h >> 31));
}

void Packet::Validate() const {
  if (size_bytes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "packet size must be >= 1 byte");
  }
  if (ingress_port >= kIngressPortLimit) {
    throw Error(ErrorCode::kInvalidArgument, "ingress port exceeds 9 bits");
  }
}

namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "Energy", "Appliances", "Hubs", "Health-Monitors", "Cameras", "Others"};

}  // namespace

std::string_view ClassName(size_t class_no) {
  if (class_no >= kNumClasses) {
    throw Error(ErrorCode::kValueOutOfRange, "class number out of range");
  }
  return kClassNames[class_no];
}

ClassLabel ClassLabel::FromNumber(uint64_t class_no) {
  if (class_no >= kNumClasses) {
    throw Error(ErrorCode::kValueOutOfRange,
                "class number " + std::to_string(class_no) + " not in 0..5");
  }
  return ClassLabel(static_cast<IotClass>(class_no));
}

ClassLabel ClassLabel::FromName(std::string_view name) {
  for (size_t i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) return ClassLabel(static_cast<IotClass>(i));
  }
  throw Error(ErrorCode::kParseFailure,
              "unknown class name '" + std::string(name) + "'");
}

std::string_view ClassLabel::name() const { return kClassNames[class_no()]; }

uint32_t ParseIpv4(std::string_view text) {
  uint32_t address = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || next == p || value > 255) {
      throw Error(ErrorCode::kParseFailure,
                  "bad IPv4 address '" + std::string(text) + "'");
    }
    address = (address << 8) | value;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') {
        throw Error(ErrorCode::kParseFailure,
                    "bad IPv4 address '" + std::string(text) + "'");
      }
      ++p;
    }
  }
  if (p != end) {
    throw Error(ErrorCode::kParseFailure,
                "bad IPv4 address '" + std::string(text) + "'");
  }
  return address;
}

std::string FormatIpv4(uint32_t address) {
  return std::to_string(address >> 24) + '.' +
         std::to_string((address >> 16) & 0xff) + '.' +
         std::to_string((address >> 8) & 0xff) + '.' +
         std::to_string(address & 0xff);
}

}  // namespace sanet
