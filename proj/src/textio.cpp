#include "weil/textio.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "weil/errors.hpp"

namespace weil::textio {

const std::string& Header::at(const std::string& key) const {
  auto it = fields.find(key);
  if (it == fields.end()) throw FormatError(kind + ": missing header field '" + key + "'");
  return it->second;
}

long Header::integer(const std::string& key) const {
  const std::string& v = at(key);
  try {
    size_t used = 0;
    long r = std::stol(v, &used);
    if (used != v.size()) throw FormatError(kind + ": bad integer for '" + key + "': " + v);
    return r;
  } catch (const std::logic_error&) {
    throw FormatError(kind + ": bad integer for '" + key + "': " + v);
  }
}

Header read_header(std::istream& in, std::string_view kind, int version, const std::vector<std::string>& keys) {
  Header h;
  std::string line;
  if (!std::getline(in, line)) throw FormatError(std::string(kind) + ": empty input");
  std::istringstream magic(line);
  std::string k, v;
  magic >> k >> v;
  if (k != kind) throw FormatError("expected a '" + std::string(kind) + "' file, found '" + k + "'");
  if (v != "v" + std::to_string(version))
    throw FormatError(std::string(kind) + ": unsupported version '" + v + "'");
  h.kind = k;
  h.version = version;
  for (const auto& key : keys) {
    if (!std::getline(in, line)) throw FormatError(h.kind + ": truncated header");
    auto eq = line.find('=');
    if (eq == std::string::npos || line.substr(0, eq) != key)
      throw FormatError(h.kind + ": expected header field '" + key + "', got '" + line + "'");
    h.fields[key] = line.substr(eq + 1);
  }
  return h;
}

void write_magic(std::ostream& out, std::string_view kind, int version) { out << kind << " v" << version << '\n'; }

bool next_record(std::istream& in, std::vector<std::string>& tokens) {
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    tokens.clear();
    std::string t;
    while (ss >> t) tokens.push_back(t);
    if (!tokens.empty()) return true;
  }
  return false;
}

}  // namespace weil::textio
