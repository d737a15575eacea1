#include "ini.h"

#include <boost/property_tree/ini_parser.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sanet/error.h"
#include "sanet/model.h"

namespace sanet::ini {

std::string ReadWholeFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Tree Parse(const std::string& text) {
  std::istringstream in(text);
  Tree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  return tree;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitList(std::string_view text, char sep) {
  std::vector<std::string_view> items;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = Trim(text.substr(start, end - start));
    if (!item.empty()) items.push_back(item);
    start = end + 1;
  }
  return items;
}

uint64_t ParseUint(std::string_view text, std::string_view what) {
  text = Trim(text);
  uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "bad unsigned value '" +
                                               std::string(text) + "' for " +
                                               std::string(what));
  }
  return value;
}

double ParseDouble(std::string_view text, std::string_view what) {
  std::string copy(Trim(text));
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(copy, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (copy.empty() || used != copy.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::kConfigInvalid,
                "bad number '" + copy + "' for " + std::string(what));
  }
  return value;
}

bool ParseBool(std::string_view text, std::string_view what) {
  text = Trim(text);
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw Error(ErrorCode::kConfigInvalid,
              "bad boolean '" + std::string(text) + "' for " + std::string(what));
}

std::pair<uint64_t, uint64_t> ParseRange(std::string_view text,
                                         std::string_view what) {
  text = Trim(text);
  size_t dash = text.find('-');
  if (dash == std::string_view::npos) {
    uint64_t v = ParseUint(text, what);
    return {v, v};
  }
  uint64_t lo = ParseUint(text.substr(0, dash), what);
  uint64_t hi = ParseUint(text.substr(dash + 1), what);
  if (lo > hi) {
    throw Error(ErrorCode::kConfigInvalid,
                "empty range '" + std::string(text) + "' for " + std::string(what));
  }
  return {lo, hi};
}

std::vector<uint64_t> ParseUintList(std::string_view text, std::string_view what) {
  std::vector<uint64_t> values;
  for (std::string_view item : SplitList(text)) {
    auto [lo, hi] = ParseRange(item, what);
    if (hi - lo > 1'000'000) {
      throw Error(ErrorCode::kConfigInvalid,
                  "range too large for " + std::string(what));
    }
    for (uint64_t v = lo; v <= hi; ++v) values.push_back(v);
  }
  return values;
}

std::vector<uint32_t> ParseIpList(std::string_view text) {
  std::vector<uint32_t> addresses;
  try {
    for (std::string_view item : SplitList(text)) {
      addresses.push_back(ParseIpv4(item));
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  return addresses;
}

std::optional<std::string> Get(const Tree& section, const std::string& key) {
  if (auto child = section.get_child_optional(Tree::path_type(key, '\0'))) {
    return std::string(Trim(child->data()));
  }
  return std::nullopt;
}

std::string Require(const Tree& section, const std::string& key,
                    std::string_view section_name) {
  auto value = Get(section, key);
  if (!value) {
    throw Error(ErrorCode::kConfigInvalid, "section [" + std::string(section_name) +
                                               "] is missing '" + key + "'");
  }
  return *value;
}

}  // namespace sanet::ini
