#include "datamon/fragments.hpp"

#include <algorithm>

namespace datamon {

namespace {

using Names = std::vector<std::string>;

Names with(Names s, const std::string &v) {
  if (std::find(s.begin(), s.end(), v) == s.end())
    s.push_back(v);
  return s;
}

Names without(Names s, const std::string &v) {
  s.erase(std::remove(s.begin(), s.end(), v), s.end());
  return s;
}

std::string join(const Names &s) {
  std::string out;
  for (const auto &v : s)
    out += "_" + v;
  return out;
}

// Pi holds (X, V, F) rather than (V, F) so that X_{V,F} is only referenced
// inside its own binder.
using Key = std::tuple<std::string, std::set<std::string>, std::set<std::string>>;

struct Guarder {
  std::map<std::string, FormulaPtr> fix; // recursion variable -> its min node
  std::map<Key, std::string> names;
  std::set<std::string> taken;

  void collect(const FormulaPtr &f) {
    if (f->kind == FKind::Min)
      fix[f->name] = f;
    for (const auto &c : children(f))
      collect(c);
  }

  Key key(const std::string &X, const Names &V, const Names &F) const {
    return {X, std::set<std::string>(V.begin(), V.end()), std::set<std::string>(F.begin(), F.end())};
  }

  std::string name(const std::string &X, const Names &V, const Names &F) {
    Key k = key(X, V, F);
    auto it = names.find(k);
    if (it != names.end())
      return it->second;
    std::string base = X + "_v" + join(V) + "_f" + join(F);
    std::string n = base;
    for (int i = 1; taken.count(n); ++i)
      n = base + "_" + std::to_string(i);
    taken.insert(n);
    names.emplace(k, n);
    return n;
  }

  FormulaPtr go(const FormulaPtr &f, const Names &V, const Names &F, const std::set<Key> &pi) {
    switch (f->kind) {
    case FKind::Tt:
    case FKind::Ff:
      return f;
    case FKind::RecVar: {
      if (pi.count(key(f->name, V, F)))
        return f_var(name(f->name, V, F));
      auto it = fix.find(f->name);
      if (it == fix.end())
        throw DomainError("gd: free recursion variable " + f->name);
      return go(it->second, V, F, pi);
    }
    case FKind::Min: {
      std::set<Key> p2 = pi;
      p2.insert(key(f->name, V, F));
      return f_min(name(f->name, V, F), go(f->a, V, F, p2));
    }
    case FKind::Forall: {
      const std::string &x = f->name;
      Names Fx = with(without(F, x), x);
      Names Vb = without(V, x);
      return f_gforall(x, go(f->a, with(Vb, x), Fx, pi), without(F, x), go(f->a, Vb, Fx, pi));
    }
    case FKind::Exists: {
      const std::string &x = f->name;
      Names Fx = with(without(F, x), x);
      Names Vb = without(V, x);
      FormulaPtr ne = neq_set_formula(x, Vb);
      FormulaPtr eq = eq_set_formula(x, Vb);
      return f_exists(x, f_or(f_and(ne ? ne : f_tt(), go(f->a, Vb, Fx, pi)),
                              f_and(eq ? eq : f_ff(), go(f->a, with(Vb, x), Fx, pi))));
    }
    case FKind::Diamond: {
      std::vector<BExprPtr> parts{f->guard};
      for (const auto &v : V)
        parts.push_back(b_neq(Term::Var(v), Term::Star()));
      BExprPtr g = V.empty() ? f->guard : b_all(parts);
      return f_diamond(g, go(f->a, V, F, pi));
    }
    case FKind::And:
      return f_and(go(f->a, V, F, pi), go(f->b, V, F, pi));
    case FKind::Or:
      return f_or(go(f->a, V, F, pi), go(f->b, V, F, pi));
    case FKind::Box:
    case FKind::Max:
      throw DomainError("gd: input contains max or box, outside minHMLd");
    case FKind::GForall:
      break;
    }
    throw DomainError("gd: unexpected guarded quantifier");
  }
};

} // namespace

FormulaPtr gd(const FormulaPtr &f, const std::vector<std::string> &V, const std::vector<std::string> &F) {
  FormulaPtr g = normalize(desugar_all(f), true).formula;
  Guarder gr;
  gr.collect(g);
  for (const auto &[X, node] : gr.fix)
    gr.taken.insert(X);
  return normalize(gr.go(g, V, F, {}), true).formula;
}

} // namespace datamon
