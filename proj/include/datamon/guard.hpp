#pragma once

#include "datamon/oracle.hpp"

namespace datamon {

enum class GuardStatus { Pending, Good, Stalled };

std::string guard_status_name(GuardStatus s);

// Streaming good-prefix monitor for a guarded formula.
class GuardedSession {
public:
  // f must already be guarded for the free variables of env0
  GuardedSession(const FormulaPtr &f, const DataEnv &env0 = {}, std::size_t budget = 0);

  // Good is irrevocable; Stalled means the last check ran out of budget
  GuardStatus feed(const DataValue &d);
  GuardStatus status() const { return status_; }
  std::optional<std::size_t> good_at() const { return good_at_; }
  std::size_t length() const { return prover_.length(); }
  const FormulaPtr &formula() const { return f_; }
  std::size_t stalls() const { return stalls_; }
  std::size_t states() const { return states_; }

private:
  FormulaPtr f_;
  GuardedProver prover_;
  GuardStatus status_ = GuardStatus::Pending;
  std::optional<std::size_t> good_at_;
  std::size_t stalls_ = 0;
  std::size_t states_ = 0;
};

// Session over gd(f) for f in minHMLd; the variables of env0 are free.
GuardedSession guard_pipeline(const FormulaPtr &f, const DataEnv &env0 = {}, std::size_t budget = 0);

} // namespace datamon
