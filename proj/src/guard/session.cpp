#include "datamon/fragments.hpp"
#include "datamon/guard.hpp"

namespace datamon {

std::string guard_status_name(GuardStatus s) {
  switch (s) {
  case GuardStatus::Pending:
    return "pending";
  case GuardStatus::Good:
    return "good";
  case GuardStatus::Stalled:
    return "stalled";
  }
  return "pending";
}

GuardedSession::GuardedSession(const FormulaPtr &f, const DataEnv &env0, std::size_t budget)
    : f_(f), prover_(f, env0, budget) {}

GuardStatus GuardedSession::feed(const DataValue &d) {
  if (status_ == GuardStatus::Good)
    return status_;
  prover_.push(d);
  GoodPrefixResult r = prover_.check();
  states_ += r.states;
  if (r.verdict == PrefixVerdict::Good) {
    status_ = GuardStatus::Good;
    good_at_ = prover_.length();
  } else if (r.budget_exhausted) {
    status_ = GuardStatus::Stalled;
    ++stalls_;
  } else {
    status_ = GuardStatus::Pending;
  }
  return status_;
}

GuardedSession guard_pipeline(const FormulaPtr &f, const DataEnv &env0, std::size_t budget) {
  FragmentReport rep = classify(normalize(desugar_all(f), true).formula);
  if (!rep.in(Fragment::minHMLd))
    throw DomainError("guard pipeline: formula outside minHMLd");
  std::vector<std::string> F;
  for (const auto &[k, v] : env0)
    F.push_back(k);
  return GuardedSession(gd(f, {}, F), env0, budget);
}

} // namespace datamon
