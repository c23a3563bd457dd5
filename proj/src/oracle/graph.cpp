#include "graph.hpp"

#include <cstdlib>
#include <deque>
#include <queue>

namespace datamon {

std::size_t default_budget() {
  if (const char *s = std::getenv("DATAMON_BUDGET")) {
    char *end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0' && v > 0)
      return static_cast<std::size_t>(v);
  }
  return 2000000;
}

namespace detail {

int ValueTable::intern(const DataValue &v) {
  auto [it, fresh] = ids.emplace(v, static_cast<int>(names.size()));
  if (fresh)
    names.push_back(v);
  return it->second;
}

int ValueTable::find(const DataValue &v) const {
  auto it = ids.find(v);
  return it == ids.end() ? -1 : it->second;
}

void ValueTable::add_fresh(std::size_t k) {
  for (std::size_t i = 0, n = 0; i < k; ++n) {
    std::string c = "⊥f" + std::to_string(n);
    if (!ids.count(c)) {
      intern(c);
      ++i;
    }
  }
}

std::string StateGraph::key(int node, int pos, const std::vector<int> &full) const {
  const auto &fv = ff->nodes[node].fv;
  std::string k;
  k.reserve(8 + 2 * fv.size());
  auto put = [&](int v) {
    k.push_back(static_cast<char>(v & 0xff));
    k.push_back(static_cast<char>((v >> 8) & 0xff));
    k.push_back(static_cast<char>((v >> 16) & 0xff));
  };
  put(node);
  put(pos);
  for (int v : fv)
    put(full[v] + 1);
  return k;
}

int StateGraph::get(int node, int pos, const std::vector<int> &full) {
  std::string k = key(node, pos, full);
  auto it = index.find(k);
  if (it != index.end())
    return it->second;
  if (states.size() >= cap)
    throw BudgetExceeded("oracle state budget of " + std::to_string(cap) + " states exceeded");
  EvalState s;
  s.node = node;
  s.pos = pos;
  for (int v : ff->nodes[node].fv) {
    if (full[v] < 0)
      throw DomainError("unbound data variable '" + ff->vars[v] + "'");
    s.env.push_back(full[v]);
  }
  int id = static_cast<int>(states.size());
  states.push_back(std::move(s));
  kind.push_back(Kind::False);
  succ.emplace_back();
  index.emplace(std::move(k), id);
  return id;
}

std::vector<int> StateGraph::full_env(const EvalState &s) const {
  std::vector<int> full(ff->vars.size(), -1);
  const auto &fv = ff->nodes[s.node].fv;
  for (std::size_t i = 0; i < fv.size(); ++i)
    full[fv[i]] = s.env[i];
  return full;
}

void StateGraph::expand(int id) {
  const EvalState s = states[id];
  const FlatNode &n = ff->nodes[s.node];
  std::vector<int> full = full_env(s);
  std::vector<int> out;
  Kind k = Kind::Or;
  switch (n.kind) {
  case FKind::Tt:
    k = Kind::True;
    break;
  case FKind::Ff:
    k = Kind::False;
    break;
  case FKind::Diamond:
  case FKind::Box: {
    bool holds = n.guard.eval([&](int v) { return full[v]; }, posval[s.pos]);
    if (holds) {
      k = n.kind == FKind::Diamond ? Kind::Or : Kind::And;
      out.push_back(get(n.a, next(s.pos), full));
    } else {
      k = n.kind == FKind::Diamond ? Kind::False : Kind::True;
    }
    break;
  }
  case FKind::Or:
  case FKind::And:
    k = n.kind == FKind::Or ? Kind::Or : Kind::And;
    out.push_back(get(n.a, s.pos, full));
    out.push_back(get(n.b, s.pos, full));
    break;
  case FKind::Exists:
  case FKind::Forall:
    k = n.kind == FKind::Exists ? Kind::Or : Kind::And;
    for (int d = 0; d < domain; ++d) {
      full[n.var] = d;
      out.push_back(get(n.a, s.pos, full));
    }
    break;
  case FKind::Min:
  case FKind::Max:
    out.push_back(get(n.a, s.pos, full));
    break;
  case FKind::RecVar:
    out.push_back(get(n.binder, s.pos, full));
    break;
  case FKind::GForall:
    throw DomainError("guarded quantifier must be desugared before evaluation");
  }
  kind[id] = k;
  succ[id] = std::move(out);
}

int StateGraph::explore(int node, int pos, const std::vector<int> &full) {
  std::size_t start = states.size();
  int root = get(node, pos, full);
  for (std::size_t i = start; i < states.size(); ++i)
    expand(static_cast<int>(i));
  return root;
}

std::vector<char> StateGraph::propagate(bool least) const {
  std::size_t n = states.size();
  std::vector<std::vector<int>> pred(n);
  for (std::size_t s = 0; s < n; ++s)
    for (int t : succ[s])
      pred[t].push_back(static_cast<int>(s));
  // least: propagate truth upward; greatest: propagate falsity
  Kind pass = least ? Kind::Or : Kind::And;
  Kind block = least ? Kind::And : Kind::Or;
  Kind base = least ? Kind::True : Kind::False;
  std::vector<char> val(n, least ? 0 : 1);
  std::vector<std::size_t> cnt(n);
  std::deque<int> q;
  for (std::size_t s = 0; s < n; ++s) {
    cnt[s] = succ[s].size();
    if (kind[s] == base || (kind[s] == block && succ[s].empty())) {
      val[s] = least ? 1 : 0;
      q.push_back(static_cast<int>(s));
    }
  }
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int p : pred[s]) {
      if (val[p] == (least ? 1 : 0))
        continue;
      if (kind[p] == pass || (kind[p] == block && --cnt[p] == 0)) {
        val[p] = least ? 1 : 0;
        q.push_back(p);
      }
    }
  }
  return val;
}

std::vector<char> StateGraph::nested() const {
  // alternation levels: even levels are least, odd levels greatest
  std::vector<int> level(ff->nodes.size(), -1);
  int maxlevel = 0;
  for (std::size_t i = 0; i < ff->nodes.size(); ++i) {
    const FlatNode &n = ff->nodes[i];
    if (n.kind != FKind::Min && n.kind != FKind::Max)
      continue;
    int up = 0;
    for (int p = n.parent; p >= 0; p = ff->nodes[p].parent)
      if (level[p] >= 0) {
        up = level[p];
        break;
      }
    int want = n.kind == FKind::Min ? 0 : 1;
    int l = up % 2 == want ? up : up + 1;
    level[i] = l;
    maxlevel = std::max(maxlevel, l);
  }
  std::vector<std::vector<int>> vars(maxlevel + 1);
  std::size_t n = states.size();
  for (std::size_t s = 0; s < n; ++s)
    if (level[states[s].node] >= 0)
      vars[level[states[s].node]].push_back(static_cast<int>(s));

  std::vector<char> val(n, 0);
  std::vector<int> stamp(n, -1);
  int epoch = 0;
  auto eval = [&](auto &self, int s) -> char {
    if (level[states[s].node] >= 0)
      return val[s];
    if (stamp[s] == epoch)
      return val[s];
    char r = 0;
    switch (kind[s]) {
    case Kind::True:
      r = 1;
      break;
    case Kind::False:
      r = 0;
      break;
    case Kind::Or:
      r = 0;
      for (int t : succ[s])
        if (self(self, t)) {
          r = 1;
          break;
        }
      break;
    case Kind::And:
      r = 1;
      for (int t : succ[s])
        if (!self(self, t)) {
          r = 0;
          break;
        }
      break;
    }
    stamp[s] = epoch;
    val[s] = r;
    return r;
  };
  auto solve = [&](auto &self, int b) -> void {
    if (b > maxlevel)
      return;
    char init = b % 2 == 0 ? 0 : 1;
    for (int s : vars[b])
      val[s] = init;
    std::vector<char> fresh(vars[b].size());
    for (;;) {
      self(self, b + 1);
      ++epoch;
      for (std::size_t i = 0; i < vars[b].size(); ++i)
        fresh[i] = eval(eval, succ[vars[b][i]][0]);
      bool changed = false;
      for (std::size_t i = 0; i < vars[b].size(); ++i)
        if (fresh[i] != val[vars[b][i]]) {
          changed = true;
          val[vars[b][i]] = fresh[i];
        }
      if (!changed)
        break;
    }
  };
  solve(solve, 0);
  ++epoch;
  std::vector<char> out(n);
  for (std::size_t s = 0; s < n; ++s)
    out[s] = eval(eval, static_cast<int>(s));
  return out;
}

std::vector<char> StateGraph::solve() const {
  bool has_min = false, has_max = false;
  for (const auto &nd : ff->nodes) {
    has_min |= nd.kind == FKind::Min;
    has_max |= nd.kind == FKind::Max;
  }
  if (has_min && has_max)
    return nested();
  return propagate(!has_max);
}

std::vector<int> StateGraph::ranks() const {
  std::size_t n = states.size();
  std::vector<std::vector<int>> pred(n);
  for (std::size_t s = 0; s < n; ++s)
    for (int t : succ[s])
      pred[t].push_back(static_cast<int>(s));
  std::vector<int> rank(n, -1), best(n, 0);
  std::vector<std::size_t> cnt(n);
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (std::size_t s = 0; s < n; ++s) {
    cnt[s] = succ[s].size();
    if (kind[s] == Kind::True || (kind[s] == Kind::And && succ[s].empty()))
      pq.emplace(0, static_cast<int>(s));
  }
  while (!pq.empty()) {
    auto [r, s] = pq.top();
    pq.pop();
    if (rank[s] >= 0)
      continue;
    rank[s] = r;
    for (int p : pred[s]) {
      if (rank[p] >= 0)
        continue;
      if (kind[p] == Kind::Or) {
        pq.emplace(r + 1, p);
      } else if (kind[p] == Kind::And) {
        best[p] = std::max(best[p], r);
        if (--cnt[p] == 0)
          pq.emplace(best[p] + 1, p);
      }
    }
  }
  return rank;
}

Prepared prepare(const FormulaPtr &f, const Lasso &t, const DataEnv &env0, std::size_t extra_fresh, bool desugar) {
  Prepared p;
  FormulaPtr g = desugar ? desugar_all(f) : f;
  p.formula = normalize(g, true).formula;
  std::vector<std::string> keys;
  for (const auto &kv : env0)
    keys.push_back(kv.first);
  for (const auto &v : free_data_vars(p.formula))
    if (!env0.count(v))
      throw DomainError("free data variable '" + v + "' is not bound by the initial environment");
  p.flat = FlatFormula::build(p.formula, keys);
  for (std::size_t i = 0; i < t.size(); ++i)
    p.values.intern(t.at(i));
  for (const auto &kv : env0)
    p.values.intern(kv.second);
  p.values.add_fresh(quantifier_depth(p.formula) + extra_fresh);
  p.root_env.assign(p.flat.vars.size(), -1);
  for (const auto &kv : env0)
    p.root_env[p.flat.var_index(kv.first)] = p.values.find(kv.second);
  return p;
}

void init_graph(StateGraph &g, const Prepared &p, const Lasso &t, std::size_t cap) {
  g.ff = &p.flat;
  g.lasso = &t;
  g.posval.clear();
  for (std::size_t i = 0; i < t.size(); ++i)
    g.posval.push_back(p.values.find(t.at(i)));
  g.domain = static_cast<int>(p.values.names.size());
  g.cap = cap ? cap : default_budget();
}

} // namespace detail

bool lasso_eval(const FormulaPtr &f, const Lasso &t, const DataEnv &env0, const OracleOptions &opt) {
  if (t.loop.empty())
    throw DomainError("lasso: loop must be nonempty");
  detail::Prepared p = detail::prepare(f, t, env0, opt.extra_fresh);
  detail::StateGraph g;
  detail::init_graph(g, p, t, opt.state_cap);
  int root = g.explore(0, 0, p.root_env);
  return g.solve()[root] != 0;
}

} // namespace datamon
