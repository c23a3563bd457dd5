#pragma once

#include "datamon/fragments.hpp"
#include "datamon/monitor.hpp"

#include <cstdint>
#include <json.hpp>

namespace datamon {

struct GenFormulaOptions {
  std::uint64_t seed = 0;
  Fragment fragment = Fragment::cHMLd;
  int depth = 3;
  int vars = 2; // distinct data variable names
};

// Closed, modally guarded formula of the fragment, normalized.  Throws
// DomainError for impossible requests.
FormulaPtr gen_formula(const GenFormulaOptions &opt);

// Tokens v0..v{k-1}.
Trace gen_trace(std::uint64_t seed, std::size_t length, std::size_t alphabet);
// Total length split into a prefix and a nonempty loop.
Lasso gen_lasso(std::uint64_t seed, std::size_t length, std::size_t alphabet);

// Closed monitor whose recursion variables sit under guard prefixes.
MonitorPtr gen_monitor(std::uint64_t seed, int depth, int vars);

// FNV-1a, hex
std::string digest(const std::string &text);

// {command, inputs digest, result}; no timing, so identical inputs give
// identical reports
nlohmann::json run_report(const std::string &command, const std::string &inputs, const nlohmann::json &result);

// Inline when the text has a comma or names no readable file.
Trace load_trace(const std::string &arg, const std::string &format = "auto");
std::string read_text_file(const std::string &path);

} // namespace datamon
