#pragma once

// Line-oriented text headers shared by the matrix, eigendata, spectrum and
// zero-table files: a magic line "<kind> v<version>" followed by key=value
// lines.

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace weil::textio {

struct Header {
  std::string kind;
  int version = 0;
  std::map<std::string, std::string> fields;

  const std::string& at(const std::string& key) const;
  long integer(const std::string& key) const;
};

/// Reads the magic line and exactly `keys.size()` key=value lines.
/// Throws FormatError for another kind, an unknown version or a missing key.
Header read_header(std::istream& in, std::string_view kind, int version, const std::vector<std::string>& keys);

void write_magic(std::ostream& out, std::string_view kind, int version);

/// Next non-empty line split on whitespace; false at end of input.
bool next_record(std::istream& in, std::vector<std::string>& tokens);

}  // namespace weil::textio
