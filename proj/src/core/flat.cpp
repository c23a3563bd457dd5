#include "datamon/flat.hpp"

#include <algorithm>

namespace datamon {

namespace {

struct Builder {
  FlatFormula &out;
  std::map<std::string, int> rbind;

  int slot(const std::string &v) {
    for (std::size_t i = 0; i < out.vars.size(); ++i)
      if (out.vars[i] == v)
        return static_cast<int>(i);
    out.vars.push_back(v);
    return static_cast<int>(out.vars.size()) - 1;
  }

  int go(const FormulaPtr &f, int parent, const std::string &path) {
    int id = static_cast<int>(out.nodes.size());
    out.nodes.emplace_back();
    {
      FlatNode &n = out.nodes[id];
      n.kind = f->kind;
      n.parent = parent;
      n.path = path;
      n.src = f;
    }
    std::string pre = path.empty() ? "" : path + ".";
    std::set<int> fv;
    switch (f->kind) {
    case FKind::Diamond:
    case FKind::Box: {
      GuardCode g = compile_guard(f->guard, [&](const std::string &v) { return slot(v); });
      fv.insert(g.vars.begin(), g.vars.end());
      int c = go(f->a, id, pre + "0");
      out.nodes[id].bguard = f->guard;
      out.nodes[id].guard = std::move(g);
      out.nodes[id].a = c;
      fv.insert(out.nodes[c].fv.begin(), out.nodes[c].fv.end());
      break;
    }
    case FKind::Exists:
    case FKind::Forall:
    case FKind::GForall: {
      int x = slot(f->name);
      out.nodes[id].var = x;
      std::vector<int> frees;
      for (const auto &v : f->frees)
        frees.push_back(slot(v));
      int c = go(f->a, id, pre + "0");
      out.nodes[id].a = c;
      fv.insert(out.nodes[c].fv.begin(), out.nodes[c].fv.end());
      if (f->b) {
        int d = go(f->b, id, pre + "1");
        out.nodes[id].b = d;
        fv.insert(out.nodes[d].fv.begin(), out.nodes[d].fv.end());
      }
      fv.insert(frees.begin(), frees.end());
      fv.erase(x);
      out.nodes[id].frees = frees;
      break;
    }
    case FKind::Min:
    case FKind::Max: {
      auto prev = rbind.find(f->name);
      std::optional<int> old;
      if (prev != rbind.end())
        old = prev->second;
      rbind[f->name] = id;
      int c = go(f->a, id, pre + "0");
      if (old)
        rbind[f->name] = *old;
      else
        rbind.erase(f->name);
      out.nodes[id].a = c;
      fv.insert(out.nodes[c].fv.begin(), out.nodes[c].fv.end());
      break;
    }
    case FKind::RecVar: {
      auto it = rbind.find(f->name);
      if (it == rbind.end())
        throw DomainError("free recursion variable '" + f->name + "'");
      out.nodes[id].binder = it->second;
      break;
    }
    case FKind::Or:
    case FKind::And: {
      int c = go(f->a, id, pre + "0");
      int d = go(f->b, id, pre + "1");
      out.nodes[id].a = c;
      out.nodes[id].b = d;
      fv.insert(out.nodes[c].fv.begin(), out.nodes[c].fv.end());
      fv.insert(out.nodes[d].fv.begin(), out.nodes[d].fv.end());
      break;
    }
    case FKind::Tt:
    case FKind::Ff:
      break;
    }
    out.nodes[id].fv.assign(fv.begin(), fv.end());
    return id;
  }
};

} // namespace

FlatFormula FlatFormula::build(const FormulaPtr &f, const std::vector<std::string> &extra) {
  FlatFormula out;
  for (const auto &v : extra)
    if (std::find(out.vars.begin(), out.vars.end(), v) == out.vars.end())
      out.vars.push_back(v);
  for (const auto &v : free_data_vars(f))
    if (std::find(out.vars.begin(), out.vars.end(), v) == out.vars.end())
      out.vars.push_back(v);
  Builder b{out, {}};
  b.go(f, -1, "");
  // a recursion variable depends on everything its fixpoint depends on, and
  // so do the nodes between the binder and the occurrence
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = out.nodes.size(); i-- > 0;) {
      FlatNode &n = out.nodes[i];
      std::set<int> fv(n.fv.begin(), n.fv.end());
      if (n.kind == FKind::RecVar) {
        const auto &bf = out.nodes[n.binder].fv;
        fv.insert(bf.begin(), bf.end());
      }
      for (int c : {n.a, n.b}) {
        if (c < 0)
          continue;
        for (int v : out.nodes[c].fv)
          if (v != n.var)
            fv.insert(v);
      }
      if (fv.size() != n.fv.size()) {
        n.fv.assign(fv.begin(), fv.end());
        changed = true;
      }
    }
  }
  return out;
}

int FlatFormula::var_index(const std::string &name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name)
      return static_cast<int>(i);
  return -1;
}

int FlatFormula::find_path(const std::string &path) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].path == path)
      return static_cast<int>(i);
  return -1;
}

} // namespace datamon
