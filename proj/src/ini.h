#ifndef SANET_SRC_INI_H
#define SANET_SRC_INI_H

// Helpers shared by the INI-style config readers (scenario, IoT profiles).

#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sanet::ini {

using Tree = boost::property_tree::ptree;

std::string ReadWholeFile(const std::string& path);

// Throws kConfigInvalid on malformed input.
Tree Parse(const std::string& text);

std::string_view Trim(std::string_view s);
std::vector<std::string_view> SplitList(std::string_view text, char sep = ',');

uint64_t ParseUint(std::string_view text, std::string_view what);
double ParseDouble(std::string_view text, std::string_view what);
bool ParseBool(std::string_view text, std::string_view what);

// "5,7,10-12" -> {5,7,10,11,12}
std::vector<uint64_t> ParseUintList(std::string_view text, std::string_view what);
// "lo-hi" or a single value.
std::pair<uint64_t, uint64_t> ParseRange(std::string_view text, std::string_view what);
std::vector<uint32_t> ParseIpList(std::string_view text);

std::optional<std::string> Get(const Tree& section, const std::string& key);
std::string Require(const Tree& section, const std::string& key,
                    std::string_view section_name);

}  // namespace sanet::ini

#endif  // SANET_SRC_INI_H
