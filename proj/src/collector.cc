#include "sanet/collector.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sanet/error.h"
#include "sanet/traffic.h"

namespace sanet {

namespace {

bool IsToken(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '=' || c == '#') {
      return false;
    }
  }
  return true;
}

std::vector<std::pair<std::string, std::string>> ParseTokens(std::string_view line) {
  std::vector<std::pair<std::string, std::string>> tokens;
  std::istringstream in{std::string(line)};
  std::string word;
  while (in >> word) {
    size_t eq = word.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kSchemaMismatch, "bad header token '" + word + "'");
    }
    tokens.emplace_back(word.substr(0, eq), word.substr(eq + 1));
  }
  return tokens;
}

}  // namespace

void PortLabelMap::Add(ClassLabel label, std::span<const uint16_t> ports) {
  for (uint16_t port : ports) {
    auto [it, inserted] = ports_.emplace(port, label);
    if (!inserted && it->second != label) {
      throw Error(ErrorCode::kOverlappingPortSets,
                  "port " + std::to_string(port) + " already labels " +
                      std::string(it->second.name()));
    }
  }
}

void PortLabelMap::AddFlowOverride(const FlowKey& key, ClassLabel label) {
  overrides_[key] = label;
}

ClassLabel PortLabelMap::Label(const TelemetryRecord& record) const {
  if (!overrides_.empty()) {
    if (auto it = overrides_.find(record.key()); it != overrides_.end()) {
      return it->second;
    }
  }
  if (auto it = ports_.find(record.dst_port); it != ports_.end()) return it->second;
  return fallback();
}

PortLabelMap PortLabelMap::FromProfiles(std::span<const IotClassProfile> profiles) {
  PortLabelMap map;
  for (const auto& profile : profiles) map.Add(profile.label, profile.dst_ports);
  return map;
}

Dataset::Dataset(Provenance provenance) : provenance_(std::move(provenance)) {
  if (!IsToken(provenance_.run_id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "run id must be a non-empty token without spaces or '='");
  }
  for (const auto& [key, value] : provenance_.extra) {
    if (!IsToken(key) || !IsToken(value) || key == "created_us") {
      throw Error(ErrorCode::kInvalidArgument, "bad provenance field '" + key + "'");
    }
  }
}

void Dataset::Append(TelemetryRecord record) {
  if (!record.label) {
    throw Error(ErrorCode::kMissingLabel, "dataset records must be labeled");
  }
  records_.push_back(std::move(record));
}

ClassLabel Collector::Ingest(TelemetryRecord record) {
  ClassLabel label = map_.Label(record);
  record.label = label;
  dataset_.Append(std::move(record));
  return label;
}

size_t WriteDataset(std::ostream& out, const Dataset& dataset) {
  const Provenance& p = dataset.provenance();
  std::vector<std::string> comments;
  comments.push_back("schema=" + std::to_string(p.schema_version) + " run=" + p.run_id);
  std::string second = "created_us=" + std::to_string(p.created_us);
  for (const auto& [key, value] : p.extra) second += " " + key + "=" + value;
  comments.push_back(second);
  WriteTraceCsv(out, comments, dataset.records(), /*with_label=*/true);
  return dataset.size();
}

size_t ExportDataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write '" + path + "'");
  size_t rows = WriteDataset(out, dataset);
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write to '" + path + "' failed");
  return rows;
}

Dataset ReadDataset(std::istream& in) {
  TraceFile file = ReadTraceCsv(in, LabelColumn::kRequired);
  if (file.comments.size() != 2) {
    throw Error(ErrorCode::kSchemaMismatch,
                "dataset needs exactly two header comment lines");
  }
  Provenance provenance;
  auto first = ParseTokens(file.comments[0]);
  if (first.size() != 2 || first[0].first != "schema" || first[1].first != "run") {
    throw Error(ErrorCode::kSchemaMismatch, "first line must be '# schema=N run=ID'");
  }
  if (first[0].second != std::to_string(kSchemaVersion)) {
    throw Error(ErrorCode::kSchemaMismatch,
                "unsupported schema version " + first[0].second);
  }
  provenance.schema_version = kSchemaVersion;
  provenance.run_id = first[1].second;
  auto second = ParseTokens(file.comments[1]);
  if (second.empty() || second[0].first != "created_us") {
    throw Error(ErrorCode::kSchemaMismatch, "second line must start with created_us");
  }
  try {
    provenance.created_us = std::stoull(second[0].second);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kSchemaMismatch, "bad created_us");
  }
  provenance.extra.assign(second.begin() + 1, second.end());

  Dataset dataset(std::move(provenance));
  for (auto& row : file.rows) dataset.Append(std::move(row));
  return dataset;
}

Dataset ImportDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open '" + path + "'");
  return ReadDataset(in);
}

}  // namespace sanet
