#include "datamon/core.hpp"

namespace datamon {

SyntaxError::SyntaxError(const std::string &msg, int l, int c)
    : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}

BExprPtr b_true() {
  static const BExprPtr t = std::make_shared<BExpr>();
  return t;
}

BExprPtr b_eq(Term l, Term r) {
  auto e = std::make_shared<BExpr>();
  e->kind = BExpr::Kind::Eq;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

BExprPtr b_not(BExprPtr x) {
  auto e = std::make_shared<BExpr>();
  e->kind = BExpr::Kind::Not;
  e->a = std::move(x);
  return e;
}

BExprPtr b_neq(Term l, Term r) { return b_not(b_eq(std::move(l), std::move(r))); }

BExprPtr b_and(BExprPtr l, BExprPtr r) {
  auto e = std::make_shared<BExpr>();
  e->kind = BExpr::Kind::And;
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}

BExprPtr b_all(const std::vector<BExprPtr> &parts) {
  if (parts.empty())
    return b_true();
  BExprPtr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i)
    acc = b_and(acc, parts[i]);
  return acc;
}

bool bexpr_equal(const BExprPtr &l, const BExprPtr &r) {
  if (l->kind != r->kind)
    return false;
  switch (l->kind) {
  case BExpr::Kind::True:
    return true;
  case BExpr::Kind::Eq:
    return l->lhs == r->lhs && l->rhs == r->rhs;
  case BExpr::Kind::Not:
    return bexpr_equal(l->a, r->a);
  case BExpr::Kind::And:
    return bexpr_equal(l->a, r->a) && bexpr_equal(l->b, r->b);
  }
  return false;
}

bool bexpr_mentions_star(const BExprPtr &e) {
  switch (e->kind) {
  case BExpr::Kind::True:
    return false;
  case BExpr::Kind::Eq:
    return e->lhs.star || e->rhs.star;
  case BExpr::Kind::Not:
    return bexpr_mentions_star(e->a);
  case BExpr::Kind::And:
    return bexpr_mentions_star(e->a) || bexpr_mentions_star(e->b);
  }
  return false;
}

void bexpr_vars(const BExprPtr &e, std::set<std::string> &out) {
  switch (e->kind) {
  case BExpr::Kind::True:
    return;
  case BExpr::Kind::Eq:
    if (!e->lhs.star)
      out.insert(e->lhs.var);
    if (!e->rhs.star)
      out.insert(e->rhs.var);
    return;
  case BExpr::Kind::Not:
    bexpr_vars(e->a, out);
    return;
  case BExpr::Kind::And:
    bexpr_vars(e->a, out);
    bexpr_vars(e->b, out);
    return;
  }
}

std::vector<BExprPtr> bexpr_conjuncts(const BExprPtr &e) {
  std::vector<BExprPtr> out;
  std::vector<BExprPtr> stack{e};
  while (!stack.empty()) {
    BExprPtr cur = stack.back();
    stack.pop_back();
    if (cur->kind == BExpr::Kind::And) {
      stack.push_back(cur->b);
      stack.push_back(cur->a);
    } else {
      out.push_back(cur);
    }
  }
  return out;
}

static Term rename_term(const Term &t, const std::map<std::string, std::string> &m) {
  if (t.star)
    return t;
  auto it = m.find(t.var);
  return it == m.end() ? t : Term::Var(it->second);
}

BExprPtr bexpr_rename(const BExprPtr &e, const std::map<std::string, std::string> &m) {
  switch (e->kind) {
  case BExpr::Kind::True:
    return e;
  case BExpr::Kind::Eq:
    return b_eq(rename_term(e->lhs, m), rename_term(e->rhs, m));
  case BExpr::Kind::Not:
    return b_not(bexpr_rename(e->a, m));
  case BExpr::Kind::And:
    return b_and(bexpr_rename(e->a, m), bexpr_rename(e->b, m));
  }
  return e;
}

static const DataValue &term_value(const Term &t, const DataEnv &env, const DataValue &current) {
  if (t.star)
    return current;
  auto it = env.find(t.var);
  if (it == env.end())
    throw DomainError("unbound data variable '" + t.var + "'");
  return it->second;
}

bool eval_bexpr(const BExprPtr &b, const DataEnv &env, const DataValue &current) {
  switch (b->kind) {
  case BExpr::Kind::True:
    return true;
  case BExpr::Kind::Eq:
    return term_value(b->lhs, env, current) == term_value(b->rhs, env, current);
  case BExpr::Kind::Not:
    return !eval_bexpr(b->a, env, current);
  case BExpr::Kind::And:
    return eval_bexpr(b->a, env, current) && eval_bexpr(b->b, env, current);
  }
  return false;
}

} // namespace datamon
