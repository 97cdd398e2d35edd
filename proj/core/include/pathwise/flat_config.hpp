#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace pathwise {

// Flat "key = value" config files: one assignment per line, '#' starts a
// comment, blank lines ignored.  Values stay strings; the CLI coerces them.
std::map<std::string, std::string> parse_flat_config(std::istream& in);
std::map<std::string, std::string> parse_flat_config_file(const std::string& filename);

}  // namespace pathwise
