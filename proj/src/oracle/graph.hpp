#pragma once

#include "datamon/flat.hpp"
#include "datamon/oracle.hpp"

#include <unordered_map>

namespace datamon::detail {

// Interned values of one evaluation: lasso values, environment values, then
// fresh representatives that occur nowhere else.
struct ValueTable {
  std::vector<DataValue> names;
  std::map<DataValue, int> ids;

  int intern(const DataValue &v);
  int find(const DataValue &v) const;
  void add_fresh(std::size_t k);
};

struct EvalState {
  int node = 0;
  int pos = 0;
  std::vector<int> env; // values of the node's fv, in order
};

// Boolean equation system over (subformula, env, lasso position).
struct StateGraph {
  enum class Kind : std::uint8_t { True, False, Or, And };

  const FlatFormula *ff = nullptr;
  const Lasso *lasso = nullptr;
  std::vector<int> posval;
  int domain = 0; // quantifiers range over ids [0, domain)
  std::size_t cap = 0;

  std::vector<EvalState> states;
  std::vector<Kind> kind;
  std::vector<std::vector<int>> succ;
  std::unordered_map<std::string, int> index;

  int next(int pos) const { return static_cast<int>(lasso->next(static_cast<std::size_t>(pos))); }
  std::string key(int node, int pos, const std::vector<int> &full) const;
  int get(int node, int pos, const std::vector<int> &full);
  std::vector<int> full_env(const EvalState &s) const;
  // explores everything reachable from the given state
  int explore(int node, int pos, const std::vector<int> &full);
  // least/greatest/nested solution depending on the fixpoints present
  std::vector<char> solve() const;
  // minimal witness height per state, -1 when false; only for min-only systems
  std::vector<int> ranks() const;

private:
  void expand(int id);
  std::vector<char> propagate(bool least) const;
  std::vector<char> nested() const;
};

struct Prepared {
  FormulaPtr formula; // normalized, gforall-free
  FlatFormula flat;
  ValueTable values;
  std::vector<int> root_env;
};

Prepared prepare(const FormulaPtr &f, const Lasso &t, const DataEnv &env0, std::size_t extra_fresh,
                 bool desugar = true);
void init_graph(StateGraph &g, const Prepared &p, const Lasso &t, std::size_t cap);

} // namespace datamon::detail
