#include "datamon/fragments.hpp"
#include "datamon/monitor.hpp"
#include "datamon/oracle.hpp"

namespace datamon {

Verdict run_violation(const FormulaPtr &f, const Trace &w) {
  if (!in_fragment(f, Fragment::sHMLd))
    throw DomainError("run_violation: formula outside sHMLd");
  return run(synthesize(dualize(f)), w);
}

HmldMonitor::HmldMonitor(const FormulaPtr &f) : f_(normalize(f, true).formula) {
  if (!in_fragment(f_, Fragment::HMLd))
    throw DomainError("hmld monitor: formula outside HMLd");
  n_ = modal_height(f_);
}

TwoVerdict HmldMonitor::classify(const Trace &w) const {
  if (w.size() < n_)
    return TwoVerdict::Undecided;
  Lasso l;
  l.prefix.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n_));
  // the loop is never read by a formula of this height
  DataValue fresh = kSentinelPrefix + "pad";
  l.loop = {fresh};
  return lasso_eval(f_, l) ? TwoVerdict::Good : TwoVerdict::Bad;
}

} // namespace datamon
