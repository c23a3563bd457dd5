#include "datamon/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace datamon {

std::string digest(const std::string &text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json run_report(const std::string &command, const std::string &inputs, const nlohmann::json &result) {
  nlohmann::json j;
  j["command"] = command;
  j["inputs"] = digest(inputs);
  j["result"] = result;
  return j;
}

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DomainError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trace load_trace(const std::string &arg, const std::string &format) {
  if (arg.find(',') == std::string::npos) {
    std::ifstream probe(arg);
    if (probe.good())
      return read_trace_file(arg, format);
  }
  return parse_trace_inline(arg);
}

} // namespace datamon
