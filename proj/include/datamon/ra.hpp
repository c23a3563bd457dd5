#pragma once

#include "datamon/monitor.hpp"

namespace datamon {

struct RALocation {
  bool universal = false;
  bool accepting = false;
  std::string label;
};

struct RATransition {
  enum class Kind { Guard, Guess, Eps };
  int from = 0;
  int to = 0;
  Kind kind = Kind::Guard;
  BExprPtr guard;  // Guard
  std::string reg; // Guess
};

// Alternating register automaton with existential guessing.  Registers start
// at pairwise distinct sentinels that never occur in traces.
struct RegisterAutomaton {
  std::vector<RALocation> locations;
  std::vector<std::string> registers;
  int initial = 0;
  std::vector<RATransition> transitions;

  // throws DomainError when malformed or a universal location guesses
  void validate() const;
  std::vector<const RATransition *> out(int loc) const;
};

nlohmann::json ra_to_json(const RegisterAutomaton &a);
RegisterAutomaton ra_from_json(const nlohmann::json &j);

RegisterAutomaton monitor_to_ra(const MonitorPtr &m);
Program compile_ra(const RegisterAutomaton &a);
// some final run on exactly w
bool ra_member(const RegisterAutomaton &a, const Trace &w);
// some prefix of w has a final run
bool ra_member_prefix(const RegisterAutomaton &a, const Trace &w);

RegisterAutomaton unravel(const RegisterAutomaton &a);
// every accepting location is existential with a true self-loop
bool ra_irrevocable(const RegisterAutomaton &a);
MonitorPtr ra_to_monitor(const RegisterAutomaton &a);

// Equality type of a register valuation: block of each register, and for
// each block whether it holds a sentinel.
struct ValType {
  std::vector<int> block;
  std::vector<bool> sentinel;
  bool operator<(const ValType &o) const { return std::tie(block, sentinel) < std::tie(o.block, o.sentinel); }
  bool operator==(const ValType &o) const = default;
};

ValType normalize_type(const std::vector<int> &block, const std::vector<bool> &sentinel);
std::string render_type(const ValType &t, const std::vector<std::string> &regs);

struct Liveness {
  std::map<std::pair<int, ValType>, bool> live; // forward-reachable pairs
  std::vector<int> location_tag;                // program node -> location
  bool is_live(int loc, const ValType &t) const;
};

Liveness nra_liveness(const RegisterAutomaton &a);
nlohmann::json liveness_to_json(const RegisterAutomaton &a, const Liveness &l);

// Bad-prefix detector for disjHMLd formulas.
class ViolationDetector {
public:
  explicit ViolationDetector(const FormulaPtr &f);
  // true once every continuation is known to violate the formula
  bool bad() const { return bad_; }
  std::optional<std::size_t> bad_at() const { return bad_ ? std::optional<std::size_t>(bad_index_) : std::nullopt; }
  bool push(const DataValue &d);
  const RegisterAutomaton &automaton() const { return ra_; }

private:
  RegisterAutomaton ra_;
  Liveness live_;
  std::unique_ptr<Engine> eng_;
  std::vector<Config> cs_;
  bool bad_ = false;
  std::size_t bad_index_ = 0;
  std::size_t consumed_ = 0;
  bool any_alive() const;
};

struct OptimalVerdict {
  bool accepted = false;
  bool rejected = false;
  std::size_t index = 0;
};

// satisfaction monitor combined with the detector
OptimalVerdict run_optimal(const FormulaPtr &f, const Trace &w);

} // namespace datamon
