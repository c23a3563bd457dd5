#include "datamon/fragments.hpp"

#include <algorithm>
#include <cctype>

namespace datamon {

const std::vector<Fragment> &all_fragments() {
  static const std::vector<Fragment> all = {Fragment::HMLd,     Fragment::cHMLd,   Fragment::sHMLd,  Fragment::disjHMLd,
                                            Fragment::conjHMLd, Fragment::minHMLd, Fragment::recHMLd};
  return all;
}

std::string fragment_name(Fragment f) {
  switch (f) {
  case Fragment::HMLd:
    return "HMLd";
  case Fragment::cHMLd:
    return "cHMLd";
  case Fragment::sHMLd:
    return "sHMLd";
  case Fragment::disjHMLd:
    return "disjHMLd";
  case Fragment::conjHMLd:
    return "conjHMLd";
  case Fragment::minHMLd:
    return "minHMLd";
  case Fragment::recHMLd:
    return "recHMLd";
  }
  return "?";
}

Fragment parse_fragment(const std::string &name) {
  auto low = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  for (Fragment f : all_fragments())
    if (low(fragment_name(f)) == low(name))
      return f;
  throw DomainError("unknown fragment '" + name + "'");
}

namespace {

// constructors allowed by each grammar; a guarded quantifier stands for its
// expansion, a conjunction of an existential and a universal
bool allowed(Fragment fr, FKind k) {
  switch (fr) {
  case Fragment::HMLd:
    return k != FKind::Min && k != FKind::Max && k != FKind::RecVar;
  case Fragment::cHMLd:
    return k == FKind::Tt || k == FKind::Diamond || k == FKind::Exists || k == FKind::Or || k == FKind::And ||
           k == FKind::Min || k == FKind::RecVar;
  case Fragment::sHMLd:
    return k == FKind::Ff || k == FKind::Box || k == FKind::Forall || k == FKind::Or || k == FKind::And ||
           k == FKind::Max || k == FKind::RecVar;
  case Fragment::disjHMLd:
    return k == FKind::Tt || k == FKind::Diamond || k == FKind::Exists || k == FKind::Or || k == FKind::Min ||
           k == FKind::RecVar;
  case Fragment::conjHMLd:
    return k == FKind::Ff || k == FKind::Box || k == FKind::Forall || k == FKind::And || k == FKind::Max ||
           k == FKind::RecVar;
  case Fragment::minHMLd:
    return k != FKind::Max;
  case Fragment::recHMLd:
    return true;
  }
  return false;
}

void scan(const FormulaPtr &f, const std::string &path, FragmentReport &r) {
  for (Fragment fr : all_fragments())
    if (r.member[fr] && !allowed(fr, f->kind)) {
      r.member[fr] = false;
      r.witness[fr] = path;
    }
  std::string pre = path.empty() ? "" : path + ".";
  auto kids = children(f);
  for (std::size_t i = 0; i < kids.size(); ++i)
    scan(kids[i], pre + std::to_string(i), r);
}

} // namespace

FragmentReport classify(const FormulaPtr &f) {
  FragmentReport r;
  for (Fragment fr : all_fragments())
    r.member[fr] = true;
  scan(f, "", r);
  r.warnings = unguarded_occurrences(f);
  r.modally_guarded = r.warnings.empty();
  return r;
}

bool in_fragment(const FormulaPtr &f, Fragment frag) { return classify(f).in(frag); }

nlohmann::json report_to_json(const FragmentReport &r) {
  nlohmann::json j;
  nlohmann::json w = nlohmann::json::object();
  for (Fragment fr : all_fragments()) {
    j[fragment_name(fr)] = r.in(fr);
    auto it = r.witness.find(fr);
    if (it != r.witness.end())
      w[fragment_name(fr)] = it->second;
  }
  j["witness"] = w;
  j["modally_guarded"] = r.modally_guarded;
  j["warnings"] = r.warnings;
  return j;
}

FormulaPtr eq_set_formula(const std::string &x, const std::vector<std::string> &V) {
  FormulaPtr acc;
  for (const auto &y : V) {
    if (y == x)
      continue;
    FormulaPtr d = f_diamond(b_eq(Term::Var(x), Term::Var(y)), f_tt());
    acc = acc ? f_or(acc, d) : d;
  }
  return acc;
}

} // namespace datamon
