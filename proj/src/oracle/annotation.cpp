#include "datamon/fragments.hpp"
#include "graph.hpp"

#include <functional>

namespace datamon {

using detail::Prepared;
using detail::StateGraph;

nlohmann::json annotation_to_json(const Annotation &a, const FormulaPtr &f) {
  FlatFormula flat = FlatFormula::build(normalize(f, true).formula);
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const auto &n = a.nodes[i];
    nlohmann::json j;
    j["id"] = i;
    j["subterm"] = n.path;
    int idx = flat.find_path(n.path);
    if (idx >= 0)
      j["formula"] = render_formula(flat.nodes[idx].src);
    j["env"] = n.env;
    j["pos"] = n.pos;
    auto w = a.witnesses.find(i);
    if (w != a.witnesses.end())
      j["witness"] = {{"D", w->second.D}, {"d_star", w->second.d_star}};
    nodes.push_back(j);
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto &[s, t] : a.edges)
    edges.push_back({s, t});
  return {{"nodes", nodes}, {"edges", edges}};
}

Annotation annotation_from_json(const nlohmann::json &j) {
  Annotation a;
  try {
    for (const auto &n : j.at("nodes")) {
      AnnotationNode an;
      an.path = n.at("subterm").get<std::string>();
      an.env = n.at("env").get<DataEnv>();
      an.pos = n.at("pos").get<std::size_t>();
      if (n.contains("witness"))
        a.witnesses[a.nodes.size()] = {n["witness"].at("D").get<std::vector<DataValue>>(),
                                       n["witness"].at("d_star").get<DataValue>()};
      a.nodes.push_back(an);
    }
    for (const auto &e : j.at("edges"))
      a.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
  } catch (const nlohmann::json::exception &e) {
    throw DomainError(std::string("malformed annotation: ") + e.what());
  }
  return a;
}

namespace detail {

// Shared structural validation for plain and guarded annotations.
struct AnnotationView {
  const FlatFormula &flat;
  const Lasso &t;
  const Annotation &a;
  std::vector<int> node_of;         // flat node per annotation node
  std::vector<std::size_t> pos_of;  // folded positions
  std::map<AnnotationNode, std::size_t> lookup;
  std::vector<std::vector<std::size_t>> out;

  AnnotationView(const FlatFormula &fl, const Lasso &tr, const Annotation &an) : flat(fl), t(tr), a(an) {
    for (const auto &n : a.nodes) {
      int idx = flat.find_path(n.path);
      if (idx < 0)
        throw DomainError("malformed annotation: unknown subterm '" + n.path + "'");
      node_of.push_back(idx);
      pos_of.push_back(t.fold(n.pos));
      AnnotationNode key = n;
      key.pos = pos_of.back();
      lookup.emplace(key, node_of.size() - 1);
    }
    out.resize(a.nodes.size());
    for (const auto &[s, d] : a.edges) {
      if (s >= a.nodes.size() || d >= a.nodes.size())
        throw DomainError("malformed annotation: edge references a missing node");
      out[s].push_back(d);
    }
  }

  std::optional<std::size_t> find(int node, const DataEnv &env, std::size_t pos) const {
    AnnotationNode k{flat.nodes[node].path, env, pos};
    auto it = lookup.find(k);
    if (it == lookup.end())
      return std::nullopt;
    return it->second;
  }

  bool linked(std::size_t from, int node, const DataEnv &env, std::size_t pos) const {
    for (std::size_t d : out[from])
      if (node_of[d] == node && pos_of[d] == pos && a.nodes[d].env == env)
        return true;
    return false;
  }

  bool acyclic() const {
    std::vector<int> color(a.nodes.size(), 0);
    std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
      color[v] = 1;
      for (std::size_t w : out[v]) {
        if (color[w] == 1)
          return false;
        if (color[w] == 0 && !dfs(w))
          return false;
      }
      color[v] = 2;
      return true;
    };
    for (std::size_t v = 0; v < a.nodes.size(); ++v)
      if (color[v] == 0 && !dfs(v))
        return false;
    return true;
  }

  bool guard_holds(int node, const DataEnv &env, std::size_t pos) const {
    return eval_bexpr(flat.nodes[node].bguard, env, t.at(pos));
  }

  std::string describe(std::size_t i) const {
    const auto &n = a.nodes[i];
    std::string env;
    for (const auto &[k, v] : n.env)
      env += (env.empty() ? "" : ",") + k + "->" + v;
    return "(" + render_formula(flat.nodes[node_of[i]].src) + ", {" + env + "}, " + std::to_string(n.pos) + ")";
  }
};

// Clauses shared by both annotation kinds; quantifier nodes are handled by
// the caller.  Returns an empty string when the clause holds.
std::string common_clause(const AnnotationView &v, std::size_t i) {
  const FlatNode &n = v.flat.nodes[v.node_of[i]];
  const DataEnv &env = v.a.nodes[i].env;
  std::size_t pos = v.pos_of[i];
  auto need = [&](int child, std::size_t p) -> bool { return v.linked(i, child, env, p); };
  try {
    switch (n.kind) {
    case FKind::Tt:
      return {};
    case FKind::Ff:
      return "ff node " + v.describe(i);
    case FKind::Diamond:
      if (!v.guard_holds(v.node_of[i], env, pos))
        return "diamond guard false at " + v.describe(i);
      if (!need(n.a, v.t.next(pos)))
        return "diamond successor missing for " + v.describe(i);
      return {};
    case FKind::Box:
      if (v.guard_holds(v.node_of[i], env, pos) && !need(n.a, v.t.next(pos)))
        return "box successor missing for " + v.describe(i);
      return {};
    case FKind::Or:
      if (!need(n.a, pos) && !need(n.b, pos))
        return "no disjunct linked from " + v.describe(i);
      return {};
    case FKind::And:
      if (!need(n.a, pos) || !need(n.b, pos))
        return "conjunct missing for " + v.describe(i);
      return {};
    case FKind::Min:
    case FKind::Max:
      if (!need(n.a, pos))
        return "fixpoint body missing for " + v.describe(i);
      return {};
    case FKind::RecVar: {
      const FlatNode &fix = v.flat.nodes[n.binder];
      if (!need(n.binder, pos) && !need(fix.a, pos))
        return "recursion variable not linked to its fixpoint for " + v.describe(i);
      return {};
    }
    default:
      return "unhandled";
    }
  } catch (const DomainError &e) {
    return std::string(e.what()) + " at " + v.describe(i);
  }
}

bool linked_with_binding(const AnnotationView &v, std::size_t i, int child, const std::string &x,
                         const std::function<bool(const DataValue &)> &accept) {
  const DataEnv &env = v.a.nodes[i].env;
  for (std::size_t d : v.out[i]) {
    if (v.node_of[d] != child || v.pos_of[d] != v.pos_of[i])
      continue;
    const DataEnv &e2 = v.a.nodes[d].env;
    auto it = e2.find(x);
    if (it == e2.end())
      continue;
    DataEnv expect = env;
    expect[x] = it->second;
    if (expect == e2 && accept(it->second))
      return true;
  }
  return false;
}

CheckResult finish(const AnnotationView &v, const DataEnv &env0) {
  if (!v.find(0, env0, 0))
    return {false, "root node missing"};
  if (!v.acyclic())
    return {false, "annotation has a cycle"};
  return {true, {}};
}

} // namespace detail

CheckResult check_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t, const Annotation &a) {
  FormulaPtr nf = normalize(f, true).formula;
  FlatFormula flat = FlatFormula::build(nf);
  detail::AnnotationView v(flat, t, a);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const FlatNode &n = flat.nodes[v.node_of[i]];
    std::string err;
    if (n.kind == FKind::Exists) {
      if (!detail::linked_with_binding(v, i, n.a, flat.vars[n.var], [](const DataValue &) { return true; }))
        err = "no witness linked from " + v.describe(i);
    } else if (n.kind == FKind::Forall || n.kind == FKind::GForall) {
      err = "universal node cannot have finitely many successors: " + v.describe(i);
    } else {
      err = detail::common_clause(v, i);
    }
    if (!err.empty())
      return {false, err};
  }
  return detail::finish(v, env0);
}

CheckResult check_guarded_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t, const Annotation &a) {
  FormulaPtr nf = normalize(f, true).formula;
  std::vector<std::string> F0;
  for (const auto &[k, v] : env0)
    F0.push_back(k);
  GuardedCheck gc = check_guarded(nf, {}, F0);
  if (!gc.ok)
    return {false, "formula not guarded: " + gc.reason};
  FlatFormula flat = FlatFormula::build(nf);
  detail::AnnotationView v(flat, t, a);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const FlatNode &n = flat.nodes[v.node_of[i]];
    const DataEnv &env = a.nodes[i].env;
    std::string err;
    if (n.kind == FKind::Exists) {
      const std::string &x = flat.vars[n.var];
      std::set<DataValue> vvals;
      auto ctx = gc.contexts.find(n.path);
      if (ctx != gc.contexts.end())
        for (const auto &y : ctx->second.V)
          if (y != x && env.count(y))
            vvals.insert(env.at(y));
      bool ok = detail::linked_with_binding(v, i, n.a, x, [](const DataValue &) { return true; });
      const FlatNode &body = flat.nodes[n.a];
      if (!ok && body.kind == FKind::Or && flat.nodes[body.a].kind == FKind::And &&
          flat.nodes[body.b].kind == FKind::And) {
        int phi1 = flat.nodes[body.a].b, phi2 = flat.nodes[body.b].b;
        ok = detail::linked_with_binding(v, i, phi1, x, [&](const DataValue &d) { return !vvals.count(d); }) ||
             detail::linked_with_binding(v, i, phi2, x, [&](const DataValue &d) { return vvals.count(d) > 0; });
      }
      if (!ok)
        err = "no witness linked from " + v.describe(i);
    } else if (n.kind == FKind::GForall) {
      const std::string &x = flat.vars[n.var];
      auto wit = a.witnesses.find(i);
      if (wit == a.witnesses.end())
        return {false, "guarded universal without witness sets at " + v.describe(i)};
      std::set<DataValue> D(wit->second.D.begin(), wit->second.D.end());
      const DataValue &ds = wit->second.d_star;
      std::set<DataValue> fvals;
      for (int y : n.frees)
        if (flat.vars[y] != x && env.count(flat.vars[y]))
          fvals.insert(env.at(flat.vars[y]));
      if (D.count(ds))
        err = "d_star belongs to D at " + v.describe(i);
      for (const auto &[k, val] : env)
        if (err.empty() && !D.count(val))
          err = "environment value " + val + " missing from D at " + v.describe(i);
      if (err.empty() && !detail::linked_with_binding(v, i, n.a, x, [&](const DataValue &d) { return d == ds; }))
        err = "guard instance for d_star missing at " + v.describe(i);
      for (const auto &d : D) {
        if (!err.empty())
          break;
        auto is_d = [&](const DataValue &e) { return e == d; };
        if (!detail::linked_with_binding(v, i, n.b, x, is_d) &&
            !(!fvals.count(d) && detail::linked_with_binding(v, i, n.a, x, is_d)))
          err = "no successor for value " + d + " at " + v.describe(i);
      }
      if (err.empty()) {
        // every value read while evaluating the guard for d_star is in D
        DataEnv genv = env;
        genv[x] = ds;
        std::vector<std::size_t> todo;
        for (std::size_t c : v.out[i])
          if (v.node_of[c] == n.a && v.pos_of[c] == v.pos_of[i] && a.nodes[c].env == genv)
            todo.push_back(c);
        std::set<std::size_t> seen;
        while (!todo.empty() && err.empty()) {
          std::size_t c = todo.back();
          todo.pop_back();
          if (!seen.insert(c).second)
            continue;
          const FlatNode &cn = flat.nodes[v.node_of[c]];
          if ((cn.kind == FKind::Diamond || cn.kind == FKind::Box) && cn.guard.star &&
              !D.count(t.at(v.pos_of[c])))
            err = "value " + t.at(v.pos_of[c]) + " read by the guard is missing from D at " + v.describe(i);
          for (std::size_t s2 : v.out[c])
            todo.push_back(s2);
        }
      }
    } else if (n.kind == FKind::Forall) {
      err = "unguarded universal node: " + v.describe(i);
    } else {
      err = detail::common_clause(v, i);
    }
    if (!err.empty())
      return {false, err};
  }
  return detail::finish(v, env0);
}

std::optional<Annotation> find_finite_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t,
                                                 std::size_t budget) {
  std::function<void(const FormulaPtr &)> check = [&](const FormulaPtr &g) {
    if (g->kind == FKind::Max || g->kind == FKind::Box || g->kind == FKind::Forall || g->kind == FKind::GForall)
      throw DomainError("find_finite_annotation: formula outside cHMLd");
    for (const auto &c : children(g))
      check(c);
  };
  check(f);
  Prepared p = detail::prepare(f, t, env0, 0, false);
  StateGraph g;
  detail::init_graph(g, p, t, budget);
  int root = g.explore(0, 0, p.root_env);
  std::vector<int> rank = g.ranks();
  if (rank[root] < 0)
    return std::nullopt;

  Annotation a;
  std::map<AnnotationNode, std::size_t> made;
  auto env_of = [&](const std::vector<int> &full) {
    DataEnv e;
    for (std::size_t v = 0; v < full.size(); ++v)
      if (full[v] >= 0)
        e[p.flat.vars[v]] = p.values.names[full[v]];
    return e;
  };
  std::function<std::size_t(int, int, const std::vector<int> &)> build = [&](int node, int pos,
                                                                             const std::vector<int> &full) {
    AnnotationNode key{p.flat.nodes[node].path, env_of(full), static_cast<std::size_t>(pos)};
    auto it = made.find(key);
    if (it != made.end())
      return it->second;
    std::size_t id = a.nodes.size();
    a.nodes.push_back(key);
    made.emplace(key, id);
    const FlatNode &n = p.flat.nodes[node];
    int sid = g.get(node, pos, full);
    auto link = [&](int child, int cpos, const std::vector<int> &cfull) {
      std::size_t c = build(child, cpos, cfull);
      a.edges.emplace_back(id, c);
    };
    auto rank_of = [&](int child, int cpos, const std::vector<int> &cfull) { return rank[g.get(child, cpos, cfull)]; };
    switch (n.kind) {
    case FKind::Diamond:
      link(n.a, g.next(pos), full);
      break;
    case FKind::Or: {
      int ra = rank_of(n.a, pos, full), rb = rank_of(n.b, pos, full);
      bool left = ra >= 0 && (rb < 0 || ra <= rb);
      link(left ? n.a : n.b, pos, full);
      break;
    }
    case FKind::And:
      link(n.a, pos, full);
      link(n.b, pos, full);
      break;
    case FKind::Exists: {
      int best = -1, bestd = -1;
      std::vector<int> cf = full;
      for (int d = 0; d < g.domain; ++d) {
        cf[n.var] = d;
        int r = rank_of(n.a, pos, cf);
        if (r >= 0 && (best < 0 || r < best)) {
          best = r;
          bestd = d;
        }
      }
      cf[n.var] = bestd;
      link(n.a, pos, cf);
      break;
    }
    case FKind::Min:
      link(n.a, pos, full);
      break;
    case FKind::RecVar:
      link(n.binder, pos, full);
      break;
    default:
      break;
    }
    (void)sid;
    return id;
  };
  build(0, 0, p.root_env);
  return a;
}

} // namespace datamon
