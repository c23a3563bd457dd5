#pragma once

#include "datamon/core.hpp"

namespace datamon {

// Formula flattened into an array in preorder; node 0 is the root.
struct FlatNode {
  FKind kind = FKind::Tt;
  int a = -1;
  int b = -1;
  int parent = -1;
  int var = -1;    // bound data variable of a quantifier
  int binder = -1; // fixpoint node of a recursion variable
  BExprPtr bguard;
  GuardCode guard;
  std::vector<int> fv;    // free data variables, sorted
  std::vector<int> frees; // GForall frees
  std::string path;       // child indices from the root, dot separated
  FormulaPtr src;
};

struct FlatFormula {
  std::vector<FlatNode> nodes;
  std::vector<std::string> vars;

  // f must have unique binding; extra names get slots before bound ones
  static FlatFormula build(const FormulaPtr &f, const std::vector<std::string> &extra = {});
  int var_index(const std::string &name) const;
  int find_path(const std::string &path) const;
  std::size_t size() const { return nodes.size(); }
};

} // namespace datamon
