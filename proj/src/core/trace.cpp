#include "datamon/core.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace datamon {

std::size_t Lasso::fold(std::size_t i) const {
  if (i < prefix.size())
    return i;
  return prefix.size() + (i - prefix.size()) % loop.size();
}

const DataValue &Lasso::at(std::size_t pos) const {
  return pos < prefix.size() ? prefix[pos] : loop[pos - prefix.size()];
}

Trace Lasso::unroll(std::size_t k) const {
  Trace out = prefix;
  for (std::size_t i = 0; i < k; ++i)
    out.insert(out.end(), loop.begin(), loop.end());
  return out;
}

std::vector<DataValue> Lasso::values() const {
  std::vector<DataValue> out;
  std::set<DataValue> seen;
  for (std::size_t i = 0; i < size(); ++i)
    if (seen.insert(at(i)).second)
      out.push_back(at(i));
  return out;
}

static Trace split_tokens(const std::string &text) {
  Trace out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty())
        out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    out.push_back(cur);
  return out;
}

Trace parse_trace_inline(const std::string &text) { return split_tokens(text); }

Trace parse_trace_lines(const std::string &text) {
  Trace out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos)
      continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(b, e - b + 1);
    if (tok.find_first_of(" \t") != std::string::npos)
      throw DomainError("trace line contains whitespace: '" + tok + "'");
    out.push_back(tok);
  }
  return out;
}

Trace parse_trace_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw DomainError(std::string("trace json: ") + e.what());
  }
  if (!j.is_array())
    throw DomainError("trace json: expected an array of strings");
  Trace out;
  for (const auto &v : j) {
    if (!v.is_string())
      throw DomainError("trace json: expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Trace read_trace_file(const std::string &path, const std::string &format) {
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open trace file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  std::string fmt = format;
  if (fmt == "auto") {
    std::size_t b = text.find_first_not_of(" \t\r\n");
    fmt = b != std::string::npos && text[b] == '[' ? "json" : "lines";
  }
  if (fmt == "json")
    return parse_trace_json(text);
  if (fmt == "lines")
    return parse_trace_lines(text);
  throw DomainError("unknown trace format '" + format + "'");
}

Lasso parse_lasso(const std::string &text) {
  std::size_t semi = text.find(';');
  if (semi == std::string::npos)
    throw DomainError("lasso: expected 'prefix ; loop'");
  Lasso l;
  l.prefix = split_tokens(text.substr(0, semi));
  l.loop = split_tokens(text.substr(semi + 1));
  if (l.loop.empty())
    throw DomainError("lasso: loop must be nonempty");
  return l;
}

std::string render_trace(const Trace &t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i)
    out += (i ? " " : "") + t[i];
  return out;
}

std::string render_lasso(const Lasso &l) {
  std::string p = render_trace(l.prefix);
  return (p.empty() ? "" : p + " ") + "; " + render_trace(l.loop);
}

Trace apply_renaming(const Renaming &sigma, const Trace &w) {
  std::map<DataValue, DataValue> inverse;
  for (const auto &[k, v] : sigma) {
    auto [it, fresh] = inverse.emplace(v, k);
    if (!fresh && it->second != k)
      throw DomainError("renaming is not injective: '" + it->second + "' and '" + k + "' both map to '" + v + "'");
  }
  Trace out;
  out.reserve(w.size());
  for (const auto &d : w) {
    auto it = sigma.find(d);
    if (it != sigma.end()) {
      out.push_back(it->second);
    } else {
      // identity outside the map must not collide with an image
      auto inv = inverse.find(d);
      if (inv != inverse.end() && inv->second != d)
        throw DomainError("renaming is not injective on '" + d + "'");
      out.push_back(d);
    }
  }
  return out;
}

Lasso apply_renaming(const Renaming &sigma, const Lasso &l) {
  return {apply_renaming(sigma, l.prefix), apply_renaming(sigma, l.loop)};
}

std::vector<int> trace_type(const Trace &w) {
  std::vector<int> out;
  std::map<DataValue, int> first;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto [it, fresh] = first.emplace(w[i], static_cast<int>(i));
    out.push_back(it->second);
  }
  return out;
}

} // namespace datamon
