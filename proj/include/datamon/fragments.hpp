#pragma once

#include "datamon/core.hpp"

#include <json.hpp>

namespace datamon {

enum class Fragment { HMLd, cHMLd, sHMLd, disjHMLd, conjHMLd, minHMLd, recHMLd };

const std::vector<Fragment> &all_fragments();
std::string fragment_name(Fragment f);
// accepts the names above case-insensitively; throws DomainError otherwise
Fragment parse_fragment(const std::string &name);

struct FragmentReport {
  std::map<Fragment, bool> member;
  // path of the first offending node, for each fragment the formula is not in
  std::map<Fragment, std::string> witness;
  bool modally_guarded = true;
  std::vector<std::string> warnings;

  bool in(Fragment f) const { return member.at(f); }
};

FragmentReport classify(const FormulaPtr &f);
bool in_fragment(const FormulaPtr &f, Fragment frag);
nlohmann::json report_to_json(const FragmentReport &r);

// x ~ V as a disjunction of <x=y>tt over V minus x; null when empty
FormulaPtr eq_set_formula(const std::string &x, const std::vector<std::string> &V);

struct GuardedContext {
  std::vector<std::string> V;
  std::vector<std::string> F;
};

struct GuardedCheck {
  bool ok = false;
  std::string reason;
  std::string path; // offending node when !ok
  nlohmann::json derivation;
  // context of every node reached by the derivation, keyed by subterm path
  std::map<std::string, GuardedContext> contexts;
  explicit operator bool() const { return ok; }
};

// Membership of f in minHMLdG[V, F]; f should be normalized.
GuardedCheck check_guarded(const FormulaPtr &f, const std::vector<std::string> &V = {},
                           const std::vector<std::string> &F = {});

// Guarded form of a max-free formula; the result is normalized.
FormulaPtr gd(const FormulaPtr &f, const std::vector<std::string> &V = {}, const std::vector<std::string> &F = {});

} // namespace datamon
