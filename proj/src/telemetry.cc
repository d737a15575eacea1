#include "sanet/telemetry.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sanet/error.h"

namespace sanet {

namespace {

constexpr uint64_t WidthLimit(unsigned bits) {
  return bits >= 64 ? UINT64_MAX : (uint64_t{1} << bits) - 1;
}

void CheckWidth(std::string_view column, uint64_t value, unsigned bits) {
  if (value > WidthLimit(bits)) {
    throw Error(ErrorCode::kFieldOverflow,
                std::string(column) + "=" + std::to_string(value) +
                    " exceeds " + std::to_string(bits) + " bits");
  }
}

std::array<uint64_t, 10> FieldValues(const TelemetryRecord& r) {
  return {r.ingress_port, r.flow_interval_time, r.enq_qdepth, r.deq_qdepth,
          r.deq_timedelta, r.protocol,          r.src_port,   r.dst_port,
          r.src_ip,        r.dst_ip};
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

uint64_t ParseUnsigned(std::string_view cell, std::string_view column,
                       size_t line_no) {
  cell = Trim(cell);
  uint64_t value = 0;
  auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw Error(ErrorCode::kFieldOverflow,
                std::string(column) + " on line " + std::to_string(line_no) +
                    " exceeds 64 bits");
  }
  if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorCode::kParseFailure,
                "bad value '" + std::string(cell) + "' for " +
                    std::string(column) + " on line " + std::to_string(line_no));
  }
  return value;
}

ClassLabel ParseLabel(std::string_view cell, size_t line_no) {
  cell = Trim(cell);
  if (!cell.empty() && cell.front() >= '0' && cell.front() <= '9') {
    return ClassLabel::FromNumber(ParseUnsigned(cell, "label", line_no));
  }
  return ClassLabel::FromName(cell);
}

}  // namespace

void TelemetryRecord::Validate() const {
  auto values = FieldValues(*this);
  for (size_t i = 0; i < kFeatureFields.size(); ++i) {
    CheckWidth(kFeatureFields[i].column, values[i], kFeatureFields[i].bits);
  }
  if (size_bytes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "size_bytes must be >= 1");
  }
}

TelemetryRecord MakeRecord(const RawTelemetry& raw) {
  const std::array<uint64_t, 10> values = {
      raw.ingress_port, raw.flow_interval_time, raw.enq_qdepth,
      raw.deq_qdepth,   raw.deq_timedelta,      raw.protocol,
      raw.src_port,     raw.dst_port,           raw.src_ip,
      raw.dst_ip};
  for (size_t i = 0; i < kFeatureFields.size(); ++i) {
    CheckWidth(kFeatureFields[i].column, values[i], kFeatureFields[i].bits);
  }
  TelemetryRecord r;
  r.ingress_port = static_cast<uint16_t>(raw.ingress_port);
  r.flow_interval_time = raw.flow_interval_time;
  r.enq_qdepth = static_cast<uint32_t>(raw.enq_qdepth);
  r.deq_qdepth = static_cast<uint32_t>(raw.deq_qdepth);
  r.deq_timedelta = static_cast<uint32_t>(raw.deq_timedelta);
  r.protocol = static_cast<uint8_t>(raw.protocol);
  r.src_port = static_cast<uint16_t>(raw.src_port);
  r.dst_port = static_cast<uint16_t>(raw.dst_port);
  r.src_ip = static_cast<uint32_t>(raw.src_ip);
  r.dst_ip = static_cast<uint32_t>(raw.dst_ip);
  return r;
}

void WriteTraceCsv(std::ostream& out, const std::vector<std::string>& comments,
                   const std::vector<TelemetryRecord>& rows, bool with_label) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (const auto& field : kFeatureFields) out << field.column << ',';
  out << "timestamp_us,size_bytes";
  if (with_label) out << ",label";
  out << '\n';
  for (const auto& row : rows) {
    for (uint64_t v : FieldValues(row)) out << v << ',';
    out << row.timestamp_us << ',' << row.size_bytes;
    if (with_label) {
      out << ',';
      if (row.label) out << static_cast<unsigned>(row.label->class_no());
    }
    out << '\n';
  }
}

TraceFile ReadTraceCsv(std::istream& in, LabelColumn labels) {
  TraceFile file;
  std::string line;
  size_t line_no = 0;

  // Column index in the file for each logical column: 10 features,
  // timestamp_us, size_bytes, label.
  constexpr size_t kTimestamp = 10, kSize = 11, kLabel = 12;
  std::array<std::optional<size_t>, 13> position;
  size_t num_columns = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (have_header) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "comment after header on line " + std::to_string(line_no));
      }
      view.remove_prefix(1);
      if (!view.empty() && view.front() == ' ') view.remove_prefix(1);
      file.comments.emplace_back(view);
      continue;
    }
    auto cells = SplitCommas(view);
    if (!have_header) {
      have_header = true;
      num_columns = cells.size();
      for (size_t c = 0; c < cells.size(); ++c) {
        std::string_view name = Trim(cells[c]);
        std::optional<size_t> logical;
        for (size_t f = 0; f < kFeatureFields.size(); ++f) {
          if (kFeatureFields[f].column == name) logical = f;
        }
        if (name == "timestamp_us") logical = kTimestamp;
        if (name == "size_bytes") logical = kSize;
        if (name == "label") logical = kLabel;
        if (!logical) {
          throw Error(ErrorCode::kSchemaMismatch,
                      "unknown column '" + std::string(name) + "'");
        }
        if (position[*logical]) {
          throw Error(ErrorCode::kSchemaMismatch,
                      "duplicate column '" + std::string(name) + "'");
        }
        position[*logical] = c;
      }
      for (size_t logical = 0; logical < kLabel; ++logical) {
        if (!position[logical]) {
          std::string_view missing = logical < 10 ? kFeatureFields[logical].column
                                     : logical == kTimestamp ? "timestamp_us"
                                                             : "size_bytes";
          throw Error(ErrorCode::kSchemaMismatch,
                      "missing column '" + std::string(missing) + "'");
        }
      }
      file.has_label_column = position[kLabel].has_value();
      if (labels == LabelColumn::kRequired && !file.has_label_column) {
        throw Error(ErrorCode::kMissingLabel, "dataset has no label column");
      }
      continue;
    }
    if (cells.size() != num_columns) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(num_columns));
    }
    RawTelemetry raw;
    std::array<uint64_t*, 10> targets = {
        &raw.ingress_port, &raw.flow_interval_time, &raw.enq_qdepth,
        &raw.deq_qdepth,   &raw.deq_timedelta,      &raw.protocol,
        &raw.src_port,     &raw.dst_port,           &raw.src_ip,
        &raw.dst_ip};
    for (size_t f = 0; f < targets.size(); ++f) {
      *targets[f] = ParseUnsigned(cells[*position[f]], kFeatureFields[f].column,
                                  line_no);
    }
    TelemetryRecord row = MakeRecord(raw);
    row.timestamp_us =
        ParseUnsigned(cells[*position[kTimestamp]], "timestamp_us", line_no);
    uint64_t size = ParseUnsigned(cells[*position[kSize]], "size_bytes", line_no);
    if (size < 1 || size > UINT32_MAX) {
      throw Error(ErrorCode::kFieldOverflow,
                  "size_bytes out of range on line " + std::to_string(line_no));
    }
    row.size_bytes = static_cast<uint32_t>(size);
    if (file.has_label_column && labels != LabelColumn::kOmit) {
      std::string_view cell = Trim(cells[*position[kLabel]]);
      if (cell.empty()) {
        if (labels == LabelColumn::kRequired) {
          throw Error(ErrorCode::kMissingLabel,
                      "row on line " + std::to_string(line_no) + " has no label");
        }
      } else {
        row.label = ParseLabel(cell, line_no);
      }
    }
    file.rows.push_back(row);
  }
  if (!have_header) {
    throw Error(ErrorCode::kSchemaMismatch, "missing header row");
  }
  return file;
}

TraceFile ReadTraceFile(const std::string& path, LabelColumn labels) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open '" + path + "'");
  return ReadTraceCsv(in, labels);
}

}  // namespace sanet
