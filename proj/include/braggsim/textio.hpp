#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace braggsim::textio {

// Parses "key = value" / "key value" lines; '#' starts a comment.
// Later keys override earlier ones.
std::map<std::string, std::string> parse_keyvalues(std::istream& in);
std::map<std::string, std::string> parse_keyvalue_file(const std::string& path);

double to_double(const std::string& key, const std::string& value);
long to_long(const std::string& key, const std::string& value);

// Shortest representation that parses back to the same double.
std::string format_double(double x);
// Fixed 4-significant-figure formatting for human reports.
std::string format_sig4(double x);

// FNV-1a 64-bit over the string bytes.
std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace braggsim::textio
