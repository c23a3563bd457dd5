#include "datamon/core.hpp"

#include <algorithm>
#include <functional>

namespace datamon {

namespace {

std::shared_ptr<Formula> mk(FKind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

FormulaPtr unary(FKind k, std::string name, FormulaPtr body) {
  auto f = mk(k);
  f->name = std::move(name);
  f->a = std::move(body);
  return f;
}

FormulaPtr binary(FKind k, FormulaPtr l, FormulaPtr r) {
  auto f = mk(k);
  f->a = std::move(l);
  f->b = std::move(r);
  return f;
}

FormulaPtr modal(FKind k, BExprPtr g, FormulaPtr body) {
  auto f = mk(k);
  f->guard = std::move(g);
  f->a = std::move(body);
  return f;
}

} // namespace

FormulaPtr f_tt() { return mk(FKind::Tt); }
FormulaPtr f_ff() { return mk(FKind::Ff); }
FormulaPtr f_diamond(BExprPtr g, FormulaPtr body) { return modal(FKind::Diamond, std::move(g), std::move(body)); }
FormulaPtr f_box(BExprPtr g, FormulaPtr body) { return modal(FKind::Box, std::move(g), std::move(body)); }
FormulaPtr f_exists(std::string x, FormulaPtr body) { return unary(FKind::Exists, std::move(x), std::move(body)); }
FormulaPtr f_forall(std::string x, FormulaPtr body) { return unary(FKind::Forall, std::move(x), std::move(body)); }
FormulaPtr f_or(FormulaPtr l, FormulaPtr r) { return binary(FKind::Or, std::move(l), std::move(r)); }
FormulaPtr f_and(FormulaPtr l, FormulaPtr r) { return binary(FKind::And, std::move(l), std::move(r)); }
FormulaPtr f_min(std::string X, FormulaPtr body) { return unary(FKind::Min, std::move(X), std::move(body)); }
FormulaPtr f_max(std::string X, FormulaPtr body) { return unary(FKind::Max, std::move(X), std::move(body)); }

FormulaPtr f_var(std::string X) {
  auto f = mk(FKind::RecVar);
  f->name = std::move(X);
  return f;
}

FormulaPtr f_gforall(std::string x, FormulaPtr guard, std::vector<std::string> frees, FormulaPtr body) {
  auto f = mk(FKind::GForall);
  f->name = std::move(x);
  f->a = std::move(guard);
  f->frees = std::move(frees);
  f->b = std::move(body);
  return f;
}

FormulaPtr with_span(FormulaPtr f, Span s) {
  auto g = std::make_shared<Formula>(*f);
  g->span = s;
  return g;
}

bool is_binder(FKind k) {
  return k == FKind::Exists || k == FKind::Forall || k == FKind::Min || k == FKind::Max || k == FKind::GForall;
}

std::vector<FormulaPtr> children(const FormulaPtr &f) {
  std::vector<FormulaPtr> out;
  if (f->a)
    out.push_back(f->a);
  if (f->b)
    out.push_back(f->b);
  return out;
}

static void fdv(const FormulaPtr &f, std::set<std::string> &bound, std::set<std::string> &out) {
  switch (f->kind) {
  case FKind::Diamond:
  case FKind::Box: {
    std::set<std::string> vs;
    bexpr_vars(f->guard, vs);
    for (const auto &v : vs)
      if (!bound.count(v))
        out.insert(v);
    fdv(f->a, bound, out);
    return;
  }
  case FKind::Exists:
  case FKind::Forall:
  case FKind::GForall: {
    bool had = bound.count(f->name) > 0;
    bound.insert(f->name);
    for (const auto &v : f->frees)
      if (!bound.count(v))
        out.insert(v);
    for (const auto &c : children(f))
      fdv(c, bound, out);
    if (!had)
      bound.erase(f->name);
    return;
  }
  default:
    for (const auto &c : children(f))
      fdv(c, bound, out);
  }
}

std::set<std::string> free_data_vars(const FormulaPtr &f) {
  std::set<std::string> bound, out;
  fdv(f, bound, out);
  return out;
}

static void frv(const FormulaPtr &f, std::set<std::string> &bound, std::set<std::string> &out) {
  if (f->kind == FKind::RecVar) {
    if (!bound.count(f->name))
      out.insert(f->name);
    return;
  }
  if (f->kind == FKind::Min || f->kind == FKind::Max) {
    bool had = bound.count(f->name) > 0;
    bound.insert(f->name);
    frv(f->a, bound, out);
    if (!had)
      bound.erase(f->name);
    return;
  }
  for (const auto &c : children(f))
    frv(c, bound, out);
}

std::set<std::string> free_rec_vars(const FormulaPtr &f) {
  std::set<std::string> bound, out;
  frv(f, bound, out);
  return out;
}

std::size_t formula_size(const FormulaPtr &f) {
  std::size_t n = 1;
  for (const auto &c : children(f))
    n += formula_size(c);
  return n;
}

std::size_t quantifier_depth(const FormulaPtr &f) {
  std::size_t d = 0;
  for (const auto &c : children(f))
    d = std::max(d, quantifier_depth(c));
  if (f->kind == FKind::Exists || f->kind == FKind::Forall)
    return d + 1;
  if (f->kind == FKind::GForall)
    return d + 2; // the expansion quantifies x twice on one branch each
  return d;
}

std::size_t modal_height(const FormulaPtr &f) {
  std::size_t d = 0;
  for (const auto &c : children(f))
    d = std::max(d, modal_height(c));
  return f->kind == FKind::Diamond || f->kind == FKind::Box ? d + 1 : d;
}

static void all_dv(const FormulaPtr &f, std::set<std::string> &out) {
  if (f->guard)
    bexpr_vars(f->guard, out);
  if (f->kind == FKind::Exists || f->kind == FKind::Forall || f->kind == FKind::GForall)
    out.insert(f->name);
  for (const auto &v : f->frees)
    out.insert(v);
  for (const auto &c : children(f))
    all_dv(c, out);
}

std::set<std::string> data_vars(const FormulaPtr &f) {
  std::set<std::string> out;
  all_dv(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// alpha equivalence

namespace {

struct AlphaCtx {
  std::vector<std::pair<std::string, std::string>> data, rec;

  static bool lookup(const std::vector<std::pair<std::string, std::string>> &s, const std::string &l,
                     const std::string &r) {
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      if (it->first == l || it->second == r)
        return it->first == l && it->second == r;
    }
    return l == r;
  }
};

bool alpha_term(const Term &l, const Term &r, const AlphaCtx &c) {
  if (l.star || r.star)
    return l.star && r.star;
  return AlphaCtx::lookup(c.data, l.var, r.var);
}

bool alpha_b(const BExprPtr &l, const BExprPtr &r, const AlphaCtx &c) {
  if (l->kind != r->kind)
    return false;
  switch (l->kind) {
  case BExpr::Kind::True:
    return true;
  case BExpr::Kind::Eq:
    return alpha_term(l->lhs, r->lhs, c) && alpha_term(l->rhs, r->rhs, c);
  case BExpr::Kind::Not:
    return alpha_b(l->a, r->a, c);
  case BExpr::Kind::And:
    return alpha_b(l->a, r->a, c) && alpha_b(l->b, r->b, c);
  }
  return false;
}

bool alpha_f(const FormulaPtr &f, const FormulaPtr &g, AlphaCtx &c) {
  if (f->kind != g->kind)
    return false;
  switch (f->kind) {
  case FKind::Tt:
  case FKind::Ff:
    return true;
  case FKind::RecVar:
    return AlphaCtx::lookup(c.rec, f->name, g->name);
  case FKind::Diamond:
  case FKind::Box:
    return alpha_b(f->guard, g->guard, c) && alpha_f(f->a, g->a, c);
  case FKind::Or:
  case FKind::And:
    return alpha_f(f->a, g->a, c) && alpha_f(f->b, g->b, c);
  case FKind::Exists:
  case FKind::Forall: {
    c.data.emplace_back(f->name, g->name);
    bool ok = alpha_f(f->a, g->a, c);
    c.data.pop_back();
    return ok;
  }
  case FKind::Min:
  case FKind::Max: {
    c.rec.emplace_back(f->name, g->name);
    bool ok = alpha_f(f->a, g->a, c);
    c.rec.pop_back();
    return ok;
  }
  case FKind::GForall: {
    if (f->frees.size() != g->frees.size())
      return false;
    for (std::size_t i = 0; i < f->frees.size(); ++i)
      if (!AlphaCtx::lookup(c.data, f->frees[i], g->frees[i]) &&
          !(f->frees[i] == f->name && g->frees[i] == g->name))
        return false;
    c.data.emplace_back(f->name, g->name);
    bool ok = alpha_f(f->a, g->a, c) && alpha_f(f->b, g->b, c);
    c.data.pop_back();
    return ok;
  }
  }
  return false;
}

} // namespace

bool alpha_equal(const FormulaPtr &f, const FormulaPtr &g) {
  AlphaCtx c;
  return alpha_f(f, g, c);
}

bool structurally_equal(const FormulaPtr &f, const FormulaPtr &g) {
  if (f->kind != g->kind || f->name != g->name || f->frees != g->frees)
    return false;
  if (f->guard && !bexpr_equal(f->guard, g->guard))
    return false;
  auto cf = children(f), cg = children(g);
  if (cf.size() != cg.size())
    return false;
  for (std::size_t i = 0; i < cf.size(); ++i)
    if (!structurally_equal(cf[i], cg[i]))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// normalization

namespace {

class Normalizer {
public:
  explicit Normalizer(const FormulaPtr &f) {
    for (const auto &v : free_data_vars(f)) {
      used_.insert(v);
      free_.insert(v);
    }
    for (const auto &v : free_rec_vars(f))
      used_.insert(v);
  }

  FormulaPtr run(const FormulaPtr &f) { return go(f); }

private:
  std::string fresh(const std::string &base) {
    if (!used_.count(base)) {
      used_.insert(base);
      return base;
    }
    for (int i = 1;; ++i) {
      std::string c = base + "_" + std::to_string(i);
      if (!used_.count(c)) {
        used_.insert(c);
        return c;
      }
    }
  }

  // A recursion variable reads its data variables where it occurs, so a
  // binder that shadows a name in scope keeps the shadowed output name.
  std::string data_binder(const std::string &v) {
    for (auto it = dscope_.rbegin(); it != dscope_.rend(); ++it)
      if (it->first == v)
        return it->second;
    if (free_.count(v))
      return v;
    return fresh(v);
  }

  std::string dlook(const std::string &v) const {
    for (auto it = dscope_.rbegin(); it != dscope_.rend(); ++it)
      if (it->first == v)
        return it->second;
    return v;
  }

  std::string rlook(const std::string &v) const {
    for (auto it = rscope_.rbegin(); it != rscope_.rend(); ++it)
      if (it->first == v)
        return it->second;
    return v;
  }

  BExprPtr guard(const BExprPtr &b) {
    std::set<std::string> vs;
    bexpr_vars(b, vs);
    std::map<std::string, std::string> m;
    for (const auto &v : vs)
      m[v] = dlook(v);
    return bexpr_rename(b, m);
  }

  FormulaPtr go(const FormulaPtr &f) {
    std::shared_ptr<Formula> out = std::make_shared<Formula>(*f);
    switch (f->kind) {
    case FKind::Tt:
    case FKind::Ff:
      break;
    case FKind::RecVar:
      out->name = rlook(f->name);
      break;
    case FKind::Diamond:
    case FKind::Box:
      out->guard = guard(f->guard);
      out->a = go(f->a);
      break;
    case FKind::Or:
    case FKind::And:
      out->a = go(f->a);
      out->b = go(f->b);
      break;
    case FKind::Exists:
    case FKind::Forall:
      out->name = data_binder(f->name);
      dscope_.emplace_back(f->name, out->name);
      out->a = go(f->a);
      dscope_.pop_back();
      break;
    case FKind::GForall: {
      for (auto &v : out->frees)
        v = v == f->name ? v : dlook(v);
      out->name = data_binder(f->name);
      for (auto &v : out->frees)
        if (v == f->name)
          v = out->name;
      dscope_.emplace_back(f->name, out->name);
      out->a = go(f->a);
      out->b = go(f->b);
      dscope_.pop_back();
      break;
    }
    case FKind::Min:
    case FKind::Max:
      out->name = fresh(f->name);
      rscope_.emplace_back(f->name, out->name);
      out->a = go(f->a);
      rscope_.pop_back();
      break;
    }
    return out;
  }

  std::set<std::string> used_;
  std::set<std::string> free_;
  std::vector<std::pair<std::string, std::string>> dscope_, rscope_;
};

void find_unguarded(const FormulaPtr &f, std::map<std::string, bool> &open, std::vector<std::string> &out) {
  switch (f->kind) {
  case FKind::RecVar: {
    auto it = open.find(f->name);
    if (it != open.end() && !it->second)
      out.push_back(f->name);
    return;
  }
  case FKind::Diamond:
  case FKind::Box: {
    std::map<std::string, bool> saved = open;
    for (auto &kv : open)
      kv.second = true;
    find_unguarded(f->a, open, out);
    open = saved;
    return;
  }
  case FKind::Min:
  case FKind::Max: {
    auto prev = open.find(f->name);
    std::optional<bool> old;
    if (prev != open.end())
      old = prev->second;
    open[f->name] = false;
    find_unguarded(f->a, open, out);
    if (old)
      open[f->name] = *old;
    else
      open.erase(f->name);
    return;
  }
  default:
    for (const auto &c : children(f))
      find_unguarded(c, open, out);
  }
}

} // namespace

std::vector<std::string> unguarded_occurrences(const FormulaPtr &f) {
  std::map<std::string, bool> open;
  std::vector<std::string> out;
  find_unguarded(f, open, out);
  return out;
}

NormalizeResult normalize(const FormulaPtr &f, bool closed) {
  if (closed) {
    auto fr = free_rec_vars(f);
    if (!fr.empty())
      throw DomainError("free recursion variable '" + *fr.begin() + "'");
  }
  NormalizeResult r;
  r.formula = Normalizer(f).run(f);
  for (const auto &X : unguarded_occurrences(r.formula)) {
    r.guarded = false;
    r.warnings.push_back("recursion variable " + X + " is not modally guarded in one occurrence");
  }
  return r;
}

// ---------------------------------------------------------------------------
// substitution, unfolding, duality

namespace {

std::string fresh_name(const std::string &base, const std::set<std::string> &avoid) {
  for (int i = 1;; ++i) {
    std::string c = base + "_" + std::to_string(i);
    if (!avoid.count(c))
      return c;
  }
}

FormulaPtr rename_rec(const FormulaPtr &f, const std::string &from, const std::string &to) {
  return substitute_rvar(f, from, f_var(to));
}

// Data variables are captured on purpose: the substituted fixpoint reads
// them where it lands, as the variable it replaces did.
FormulaPtr subst(const FormulaPtr &f, const std::string &X, const FormulaPtr &by, const std::set<std::string> &fvr) {
  switch (f->kind) {
  case FKind::RecVar:
    return f->name == X ? by : f;
  case FKind::Tt:
  case FKind::Ff:
    return f;
  case FKind::Min:
  case FKind::Max: {
    if (f->name == X)
      return f;
    FormulaPtr body = f->a;
    std::string name = f->name;
    if (fvr.count(name)) {
      std::set<std::string> avoid = fvr;
      for (const auto &v : free_rec_vars(body))
        avoid.insert(v);
      avoid.insert(X);
      name = fresh_name(name, avoid);
      body = rename_rec(body, f->name, name);
    }
    auto out = std::make_shared<Formula>(*f);
    out->name = name;
    out->a = subst(body, X, by, fvr);
    return out;
  }
  default: {
    auto out = std::make_shared<Formula>(*f);
    if (f->a)
      out->a = subst(f->a, X, by, fvr);
    if (f->b)
      out->b = subst(f->b, X, by, fvr);
    return out;
  }
  }
}

} // namespace

FormulaPtr substitute_rvar(const FormulaPtr &f, const std::string &X, const FormulaPtr &by) {
  return subst(f, X, by, free_rec_vars(by));
}

FormulaPtr unfold(const FormulaPtr &fix) {
  if (fix->kind != FKind::Min && fix->kind != FKind::Max)
    throw DomainError("unfold: argument is not a fixed point");
  return substitute_rvar(fix->a, fix->name, fix);
}

FormulaPtr neq_set_formula(const std::string &x, const std::vector<std::string> &F) {
  FormulaPtr acc;
  for (const auto &y : F) {
    if (y == x)
      continue;
    FormulaPtr d = f_diamond(b_neq(Term::Var(x), Term::Var(y)), f_tt());
    acc = acc ? f_and(acc, d) : d;
  }
  return acc;
}

FormulaPtr desugar_gforall(const FormulaPtr &g) {
  if (g->kind != FKind::GForall)
    throw DomainError("desugar_gforall: not a guarded quantifier");
  FormulaPtr ne = neq_set_formula(g->name, g->frees);
  FormulaPtr guard = ne ? f_and(ne, g->a) : g->a;
  return f_and(f_exists(g->name, guard), f_forall(g->name, f_or(guard, g->b)));
}

FormulaPtr dualize(const FormulaPtr &f) {
  auto out = std::make_shared<Formula>(*f);
  switch (f->kind) {
  case FKind::Tt:
    out->kind = FKind::Ff;
    return out;
  case FKind::Ff:
    out->kind = FKind::Tt;
    return out;
  case FKind::RecVar:
    return out;
  case FKind::Diamond:
    out->kind = FKind::Box;
    break;
  case FKind::Box:
    out->kind = FKind::Diamond;
    break;
  case FKind::Exists:
    out->kind = FKind::Forall;
    break;
  case FKind::Forall:
    out->kind = FKind::Exists;
    break;
  case FKind::Or:
    out->kind = FKind::And;
    break;
  case FKind::And:
    out->kind = FKind::Or;
    break;
  case FKind::Min:
    out->kind = FKind::Max;
    break;
  case FKind::Max:
    out->kind = FKind::Min;
    break;
  case FKind::GForall:
    return dualize(desugar_gforall(f));
  }
  if (f->a)
    out->a = dualize(f->a);
  if (f->b)
    out->b = dualize(f->b);
  return out;
}

FormulaPtr desugar_all(const FormulaPtr &f) {
  if (f->kind == FKind::GForall) {
    auto g = std::make_shared<Formula>(*f);
    g->a = desugar_all(f->a);
    g->b = desugar_all(f->b);
    return desugar_gforall(g);
  }
  auto out = std::make_shared<Formula>(*f);
  if (f->a)
    out->a = desugar_all(f->a);
  if (f->b)
    out->b = desugar_all(f->b);
  return out;
}

} // namespace datamon
