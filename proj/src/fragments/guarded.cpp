#include "datamon/fragments.hpp"

#include <algorithm>

namespace datamon {

namespace {

using Names = std::vector<std::string>;

bool has(const Names &s, const std::string &v) { return std::find(s.begin(), s.end(), v) != s.end(); }

Names with(Names s, const std::string &v) {
  if (!has(s, v))
    s.push_back(v);
  return s;
}

Names without(Names s, const std::string &v) {
  s.erase(std::remove(s.begin(), s.end(), v), s.end());
  return s;
}

bool same_set(const Names &a, const Names &b) {
  return std::set<std::string>(a.begin(), a.end()) == std::set<std::string>(b.begin(), b.end());
}

bool is_star_neq(const BExprPtr &c, const std::string &v) {
  if (c->kind != BExpr::Kind::Not || c->a->kind != BExpr::Kind::Eq)
    return false;
  const Term &l = c->a->lhs, &r = c->a->rhs;
  return (l.star && !r.star && r.var == v) || (r.star && !l.star && l.var == v);
}

// the atoms <x op y>tt of a chain built with op, y ranging over exactly ys
bool match_chain(const FormulaPtr &f, FKind join, bool eq, const std::string &x, const Names &ys) {
  std::vector<FormulaPtr> atoms;
  std::vector<FormulaPtr> todo{f};
  while (!todo.empty()) {
    FormulaPtr g = todo.back();
    todo.pop_back();
    if (g->kind == join) {
      todo.push_back(g->a);
      todo.push_back(g->b);
    } else {
      atoms.push_back(g);
    }
  }
  std::set<std::string> seen;
  for (const auto &a : atoms) {
    if (a->kind != FKind::Diamond || a->a->kind != FKind::Tt)
      return false;
    BExprPtr e = a->guard;
    if (!eq) {
      if (e->kind != BExpr::Kind::Not)
        return false;
      e = e->a;
    }
    if (e->kind != BExpr::Kind::Eq || e->lhs.star || e->rhs.star)
      return false;
    std::string other;
    if (e->lhs.var == x)
      other = e->rhs.var;
    else if (e->rhs.var == x)
      other = e->lhs.var;
    else
      return false;
    seen.insert(other);
  }
  return seen == std::set<std::string>(ys.begin(), ys.end()) && atoms.size() == ys.size();
}

bool match_side(const FormulaPtr &f, bool eq, const std::string &x, const Names &ys) {
  if (ys.empty())
    return f->kind == (eq ? FKind::Ff : FKind::Tt);
  return match_chain(f, eq ? FKind::Or : FKind::And, eq, x, ys);
}

struct Checker {
  GuardedCheck &out;
  std::map<std::string, GuardedContext> binder_ctx; // recursion variable -> context of its min

  bool fail(const std::string &path, const std::string &why) {
    out.ok = false;
    out.reason = why;
    out.path = path;
    return false;
  }

  bool go(const FormulaPtr &f, const Names &V, const Names &F, const std::string &path, nlohmann::json &d) {
    out.contexts[path] = {V, F};
    d["path"] = path;
    d["V"] = V;
    d["F"] = F;
    std::string pre = path.empty() ? "" : path + ".";
    auto sub = [&](const FormulaPtr &g, const Names &v2, const Names &f2, const std::string &p) {
      nlohmann::json c;
      bool ok = go(g, v2, f2, p, c);
      d["children"].push_back(std::move(c));
      return ok;
    };
    switch (f->kind) {
    case FKind::Tt:
    case FKind::Ff:
      d["rule"] = f->kind == FKind::Tt ? "tt" : "ff";
      return true;
    case FKind::RecVar: {
      d["rule"] = "var";
      auto it = binder_ctx.find(f->name);
      if (it == binder_ctx.end())
        return fail(path, "free recursion variable " + f->name);
      if (!same_set(it->second.V, V) || !same_set(it->second.F, F))
        return fail(path, "recursion variable " + f->name + " used in a context different from its binder");
      return true;
    }
    case FKind::Min:
      d["rule"] = "min";
      binder_ctx[f->name] = {V, F};
      return sub(f->a, V, F, pre + "0");
    case FKind::Diamond: {
      d["rule"] = "diamond";
      std::set<std::string> vs;
      bexpr_vars(f->guard, vs);
      for (const auto &v : vs)
        if (!has(F, v))
          return fail(path, "guard mentions variable " + v + " outside F");
      auto cs = bexpr_conjuncts(f->guard);
      for (const auto &v : V)
        if (std::none_of(cs.begin(), cs.end(), [&](const BExprPtr &c) { return is_star_neq(c, v); }))
          return fail(path, "guard lacks the conjunct *!=" + v);
      return sub(f->a, V, F, pre + "0");
    }
    case FKind::And:
    case FKind::Or:
      d["rule"] = f->kind == FKind::And ? "and" : "or";
      return sub(f->a, V, F, pre + "0") && sub(f->b, V, F, pre + "1");
    case FKind::GForall: {
      d["rule"] = "gforall";
      const std::string &x = f->name;
      if (!same_set(without(f->frees, x), without(F, x)))
        return fail(path, "guarded quantifier frees differ from the free variables in scope");
      Names Fx = with(without(F, x), x);
      return sub(f->a, with(without(V, x), x), Fx, pre + "0") && sub(f->b, without(V, x), Fx, pre + "1");
    }
    case FKind::Exists: {
      d["rule"] = "exists";
      const std::string &x = f->name;
      const FormulaPtr &body = f->a;
      Names Vx = without(V, x);
      if (body->kind != FKind::Or || body->a->kind != FKind::And || body->b->kind != FKind::And)
        return fail(path, "existential body is not of the form (x!=V & _) | (x~V & _)");
      if (!match_side(body->a->a, false, x, Vx))
        return fail(path + (path.empty() ? "" : ".") + "0.0.0", "expected x!=V");
      if (!match_side(body->b->a, true, x, Vx))
        return fail(path + (path.empty() ? "" : ".") + "0.1.0", "expected x~V");
      Names Fx = with(without(F, x), x);
      std::string b = pre + "0.";
      out.contexts[pre + "0"] = {V, F};
      out.contexts[b + "0"] = {V, F};
      out.contexts[b + "1"] = {V, F};
      return sub(body->a->b, Vx, Fx, b + "0.1") && sub(body->b->b, with(Vx, x), Fx, b + "1.1");
    }
    case FKind::Box:
    case FKind::Forall:
    case FKind::Max:
      d["rule"] = "none";
      return fail(path, "constructor outside the guarded fragment");
    }
    return fail(path, "unknown constructor");
  }
};

} // namespace

GuardedCheck check_guarded(const FormulaPtr &f, const std::vector<std::string> &V, const std::vector<std::string> &F) {
  GuardedCheck out;
  for (const auto &v : V)
    if (!has(F, v)) {
      out.reason = "V must be a subset of F";
      return out;
    }
  for (const auto &v : free_data_vars(f))
    if (!has(F, v)) {
      out.reason = "free data variable " + v + " not in F";
      out.path = "";
      return out;
    }
  Checker c{out, {}};
  out.ok = true;
  nlohmann::json d;
  c.go(f, V, F, "", d);
  out.derivation = std::move(d);
  return out;
}

} // namespace datamon
