#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace datamon {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string &msg, int line, int col);
  int line;
  int col;
};

// Input outside the domain of an operation (wrong fragment, unbound variable, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

using DataValue = std::string;
using Trace = std::vector<DataValue>;
using DataEnv = std::map<std::string, DataValue>;

struct Lasso {
  Trace prefix;
  Trace loop;

  std::size_t size() const { return prefix.size() + loop.size(); }
  // position in [0, size()) holding the value read at unrolled index i
  std::size_t fold(std::size_t i) const;
  std::size_t next(std::size_t pos) const { return pos + 1 < size() ? pos + 1 : prefix.size(); }
  const DataValue &at(std::size_t pos) const;
  // prefix followed by k copies of the loop
  Trace unroll(std::size_t k) const;
  std::vector<DataValue> values() const;
};

struct Span {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Boolean constraint expressions

struct Term {
  bool star = false;
  std::string var;

  static Term Star() { return {true, {}}; }
  static Term Var(std::string v) { return {false, std::move(v)}; }
  bool operator==(const Term &) const = default;
  bool operator<(const Term &o) const { return std::tie(star, var) < std::tie(o.star, o.var); }
};

struct BExpr;
using BExprPtr = std::shared_ptr<const BExpr>;

struct BExpr {
  enum class Kind { True, Eq, Not, And };
  Kind kind = Kind::True;
  Term lhs, rhs;
  BExprPtr a, b;
};

BExprPtr b_true();
BExprPtr b_eq(Term l, Term r);
BExprPtr b_neq(Term l, Term r);
BExprPtr b_not(BExprPtr e);
BExprPtr b_and(BExprPtr l, BExprPtr r);
// conjunction of a list; empty list is True
BExprPtr b_all(const std::vector<BExprPtr> &parts);

bool bexpr_equal(const BExprPtr &l, const BExprPtr &r);
bool bexpr_mentions_star(const BExprPtr &e);
void bexpr_vars(const BExprPtr &e, std::set<std::string> &out);
// top-level conjuncts, flattening nested And
std::vector<BExprPtr> bexpr_conjuncts(const BExprPtr &e);
BExprPtr bexpr_rename(const BExprPtr &e, const std::map<std::string, std::string> &m);

bool eval_bexpr(const BExprPtr &b, const DataEnv &env, const DataValue &current);

// Guard over variable indices; terms are -1 for the current value, else a
// variable slot.  Values are interned ids compared for equality only.
struct GuardCode {
  struct Node {
    BExpr::Kind kind;
    int l = -1, r = -1;
    int a = -1, b = -1;
  };
  std::vector<Node> nodes;
  int root = -1;
  bool star = false;
  std::vector<int> vars;

  template <class Val> bool eval(const Val &val, int current) const { return ev(root, val, current); }

private:
  template <class Val> bool ev(int i, const Val &val, int current) const {
    const Node &n = nodes[i];
    switch (n.kind) {
    case BExpr::Kind::True:
      return true;
    case BExpr::Kind::Eq:
      return (n.l < 0 ? current : val(n.l)) == (n.r < 0 ? current : val(n.r));
    case BExpr::Kind::Not:
      return !ev(n.a, val, current);
    case BExpr::Kind::And:
      return ev(n.a, val, current) && ev(n.b, val, current);
    }
    return false;
  }
};

template <class Index> GuardCode compile_guard(const BExprPtr &b, const Index &index) {
  GuardCode g;
  std::set<int> vs;
  auto term = [&](const Term &t) {
    if (t.star) {
      g.star = true;
      return -1;
    }
    int v = index(t.var);
    vs.insert(v);
    return v;
  };
  auto rec = [&](auto &self, const BExprPtr &e) -> int {
    GuardCode::Node n;
    n.kind = e->kind;
    if (e->kind == BExpr::Kind::Eq) {
      n.l = term(e->lhs);
      n.r = term(e->rhs);
    } else if (e->kind == BExpr::Kind::Not) {
      n.a = self(self, e->a);
    } else if (e->kind == BExpr::Kind::And) {
      n.a = self(self, e->a);
      n.b = self(self, e->b);
    }
    g.nodes.push_back(n);
    return static_cast<int>(g.nodes.size()) - 1;
  };
  g.root = rec(rec, b);
  g.vars.assign(vs.begin(), vs.end());
  return g;
}

// ---------------------------------------------------------------------------
// Formulas

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class FKind { Tt, Ff, Diamond, Box, Exists, Forall, Or, And, Min, Max, RecVar, GForall };

struct Formula {
  FKind kind = FKind::Tt;
  BExprPtr guard;                 // Diamond, Box
  std::string name;               // bound data variable or recursion variable
  std::vector<std::string> frees; // GForall
  FormulaPtr a;                   // body, left operand, guard formula of GForall
  FormulaPtr b;                   // right operand, body of GForall
  Span span;
};

FormulaPtr f_tt();
FormulaPtr f_ff();
FormulaPtr f_diamond(BExprPtr g, FormulaPtr body);
FormulaPtr f_box(BExprPtr g, FormulaPtr body);
FormulaPtr f_exists(std::string x, FormulaPtr body);
FormulaPtr f_forall(std::string x, FormulaPtr body);
FormulaPtr f_or(FormulaPtr l, FormulaPtr r);
FormulaPtr f_and(FormulaPtr l, FormulaPtr r);
FormulaPtr f_min(std::string X, FormulaPtr body);
FormulaPtr f_max(std::string X, FormulaPtr body);
FormulaPtr f_var(std::string X);
FormulaPtr f_gforall(std::string x, FormulaPtr guard, std::vector<std::string> frees, FormulaPtr body);
FormulaPtr with_span(FormulaPtr f, Span s);

bool is_binder(FKind k);
bool is_rvar_name(const std::string &id);

FormulaPtr parse_formula(const std::string &text);
BExprPtr parse_bexpr(const std::string &text);
std::string render_formula(const FormulaPtr &f);
std::string render_bexpr(const BExprPtr &b);

std::set<std::string> free_data_vars(const FormulaPtr &f);
std::set<std::string> free_rec_vars(const FormulaPtr &f);
std::size_t formula_size(const FormulaPtr &f);
std::size_t quantifier_depth(const FormulaPtr &f);
std::size_t modal_height(const FormulaPtr &f);
std::set<std::string> data_vars(const FormulaPtr &f);

bool alpha_equal(const FormulaPtr &f, const FormulaPtr &g);
bool structurally_equal(const FormulaPtr &f, const FormulaPtr &g);

struct NormalizeResult {
  FormulaPtr formula;
  std::vector<std::string> warnings;
  bool guarded = true;
};

// Unique binding for recursion and bound data variables.  Free data
// variables keep their names.  Throws DomainError on a free recursion
// variable when closed is set.
NormalizeResult normalize(const FormulaPtr &f, bool closed = true);
// Recursion variable occurrences not under a modality within their binder.
std::vector<std::string> unguarded_occurrences(const FormulaPtr &f);

FormulaPtr substitute_rvar(const FormulaPtr &f, const std::string &X, const FormulaPtr &by);
FormulaPtr unfold(const FormulaPtr &fix);
FormulaPtr dualize(const FormulaPtr &f);
// x != F as a conjunction of <x!=y>tt over F minus x; null when empty
FormulaPtr neq_set_formula(const std::string &x, const std::vector<std::string> &F);
// exists x.(x!=F & g) & forall x.((x!=F & g) | body); binds x twice, renormalize after
FormulaPtr desugar_gforall(const FormulaPtr &g);
FormulaPtr desugar_all(const FormulaPtr &f);
// child i of a node, in the order used by subterm paths
std::vector<FormulaPtr> children(const FormulaPtr &f);

// ---------------------------------------------------------------------------
// Traces and renamings

Trace parse_trace_inline(const std::string &text);
Trace parse_trace_lines(const std::string &text);
Trace parse_trace_json(const std::string &text);
Trace read_trace_file(const std::string &path, const std::string &format = "auto");
Lasso parse_lasso(const std::string &text);
std::string render_lasso(const Lasso &l);
std::string render_trace(const Trace &t);

using Renaming = std::map<DataValue, DataValue>;
Trace apply_renaming(const Renaming &sigma, const Trace &w);
Lasso apply_renaming(const Renaming &sigma, const Lasso &l);
// equality type: index of first occurrence of each value
std::vector<int> trace_type(const Trace &w);

} // namespace datamon
