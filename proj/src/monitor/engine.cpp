#include "datamon/monitor.hpp"

#include <algorithm>
#include <climits>

namespace datamon {

const std::string kSentinelPrefix = "⊥";

bool is_sentinel(const DataValue &v) { return v.compare(0, kSentinelPrefix.size(), kSentinelPrefix) == 0; }

int Program::var_index(const std::string &v) {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v)
      return static_cast<int>(i);
  vars.push_back(v);
  return static_cast<int>(vars.size()) - 1;
}

Program compile_monitor(const MonitorPtr &m) {
  Program p;
  std::vector<std::pair<std::string, int>> scope;
  auto add = [&](Program::Kind k) {
    Program::Node n;
    n.kind = k;
    p.nodes.push_back(std::move(n));
    return static_cast<int>(p.nodes.size()) - 1;
  };
  std::function<int(const MonitorPtr &)> go = [&](const MonitorPtr &n) -> int {
    switch (n->kind) {
    case MKind::Yes:
      return add(Program::Kind::Yes);
    case MKind::End:
      return add(Program::Kind::End);
    case MKind::Guard: {
      int id = add(Program::Kind::Read);
      p.nodes[id].bguard = n->guard;
      p.nodes[id].guard = compile_guard(n->guard, [&](const std::string &v) { return p.var_index(v); });
      int c = go(n->a);
      p.nodes[id].next = c;
      return id;
    }
    case MKind::Guess: {
      int id = add(Program::Kind::Guess);
      p.nodes[id].var = p.var_index(n->name);
      int c = go(n->a);
      p.nodes[id].next = c;
      return id;
    }
    case MKind::Or:
    case MKind::And: {
      int id = add(n->kind == MKind::Or ? Program::Kind::Or : Program::Kind::And);
      int l = go(n->a);
      int r = go(n->b);
      p.nodes[id].kids = {l, r};
      return id;
    }
    case MKind::Rec: {
      int id = add(Program::Kind::Jump);
      scope.emplace_back(n->name, id);
      int c = go(n->a);
      scope.pop_back();
      p.nodes[id].next = c;
      return id;
    }
    case MKind::Var: {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == n->name) {
          int id = add(Program::Kind::Jump);
          p.nodes[id].next = it->second;
          return id;
        }
      throw DomainError("monitor has free recursion variable " + n->name);
    }
    }
    return -1;
  };
  p.root = go(m);
  return p;
}

namespace {

constexpr int kYes = -1;
constexpr int kEnd = -2;

CTree leaf(int node, std::vector<Val> env = {}) {
  CTree t;
  t.node = node;
  t.env = std::move(env);
  return t;
}

bool is_yes(const CTree &t) { return t.kind == CTree::Kind::Leaf && t.node == kYes; }
bool is_end(const CTree &t) { return t.kind == CTree::Kind::Leaf && t.node == kEnd; }

void put_val(std::string &k, const Val &v, const std::map<int, int> *renum) {
  if (v.sym >= 0) {
    k += "s";
    if (renum) {
      auto it = renum->find(v.sym);
      k += std::to_string(it == renum->end() ? -1 : it->second);
    }
  } else {
    k += "c" + std::to_string(v.conc.size()) + ":" + v.conc;
  }
  k += ",";
}

// tree key; symbols are anonymous when renum is null
void tree_key(const CTree &t, std::string &k, const std::map<int, int> *renum) {
  switch (t.kind) {
  case CTree::Kind::Leaf:
    k += "L" + std::to_string(t.node) + "(";
    for (const auto &v : t.env)
      put_val(k, v, renum);
    k += ")";
    return;
  case CTree::Kind::Or:
  case CTree::Kind::And:
    k += t.kind == CTree::Kind::Or ? "O[" : "A[";
    for (const auto &c : t.kids) {
      tree_key(c, k, renum);
      k += ";";
    }
    k += "]";
    return;
  }
}

std::string raw_key(const CTree &t) {
  // symbol ids kept verbatim, for deduplication inside one config
  std::string k;
  std::function<void(const CTree &)> go = [&](const CTree &n) {
    if (n.kind == CTree::Kind::Leaf) {
      k += "L" + std::to_string(n.node) + "(";
      for (const auto &v : n.env)
        k += v.sym >= 0 ? "s" + std::to_string(v.sym) + "," : "c" + std::to_string(v.conc.size()) + ":" + v.conc + ",";
      k += ")";
      return;
    }
    k += n.kind == CTree::Kind::Or ? "O[" : "A[";
    for (const auto &c : n.kids) {
      go(c);
      k += ";";
    }
    k += "]";
  };
  go(t);
  return k;
}

CTree simplify(CTree t) {
  if (t.kind == CTree::Kind::Leaf)
    return t;
  bool is_or = t.kind == CTree::Kind::Or;
  std::vector<CTree> kids;
  for (auto &c : t.kids) {
    CTree s = simplify(std::move(c));
    if (s.kind == t.kind) {
      for (auto &g : s.kids)
        kids.push_back(std::move(g));
      continue;
    }
    if (is_or ? is_yes(s) : is_end(s))
      return leaf(is_or ? kYes : kEnd);
    if (is_or ? is_end(s) : is_yes(s))
      continue;
    kids.push_back(std::move(s));
  }
  if (kids.empty())
    return leaf(is_or ? kEnd : kYes);
  std::vector<std::pair<std::string, std::size_t>> keyed;
  for (std::size_t i = 0; i < kids.size(); ++i)
    keyed.emplace_back(raw_key(kids[i]), i);
  std::sort(keyed.begin(), keyed.end());
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto &a, const auto &b) { return a.first == b.first; }),
              keyed.end());
  if (keyed.size() == 1)
    return std::move(kids[keyed[0].second]);
  CTree out;
  out.kind = t.kind;
  for (const auto &[k, i] : keyed)
    out.kids.push_back(std::move(kids[i]));
  return out;
}

void collect_syms(const CTree &t, std::vector<int> &order, std::set<int> &seen) {
  if (t.kind == CTree::Kind::Leaf) {
    for (const auto &v : t.env)
      if (v.sym >= 0 && seen.insert(v.sym).second)
        order.push_back(v.sym);
    return;
  }
  for (const auto &c : t.kids)
    collect_syms(c, order, seen);
}

void sort_anon(CTree &t) {
  if (t.kind == CTree::Kind::Leaf)
    return;
  for (auto &c : t.kids)
    sort_anon(c);
  std::vector<std::pair<std::string, std::size_t>> keyed;
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    std::string k;
    tree_key(t.kids[i], k, nullptr);
    keyed.emplace_back(std::move(k), i);
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
  std::vector<CTree> kids;
  for (const auto &[k, i] : keyed)
    kids.push_back(std::move(t.kids[i]));
  t.kids = std::move(kids);
}

void rename_syms(CTree &t, const std::map<int, int> &m) {
  if (t.kind == CTree::Kind::Leaf) {
    for (auto &v : t.env)
      if (v.sym >= 0)
        v.sym = m.at(v.sym);
    return;
  }
  for (auto &c : t.kids)
    rename_syms(c, m);
}

void subst_tree(CTree &t, const std::map<int, Val> &m) {
  if (t.kind == CTree::Kind::Leaf) {
    for (auto &v : t.env)
      if (v.sym >= 0) {
        auto it = m.find(v.sym);
        if (it != m.end())
          v = it->second;
      }
    return;
  }
  for (auto &c : t.kids)
    subst_tree(c, m);
}

void leaves(CTree &t, std::vector<CTree *> &out) {
  if (t.kind == CTree::Kind::Leaf) {
    out.push_back(&t);
    return;
  }
  for (auto &c : t.kids)
    leaves(c, out);
}

std::vector<std::set<int>> live_vars(const Program &p) {
  std::vector<std::set<int>> live(p.nodes.size());
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = p.nodes.size(); i-- > 0;) {
      const auto &n = p.nodes[i];
      std::set<int> s;
      switch (n.kind) {
      case Program::Kind::Read:
      case Program::Kind::ReadUniv:
        s.insert(n.guard.vars.begin(), n.guard.vars.end());
        s.insert(live[n.next].begin(), live[n.next].end());
        break;
      case Program::Kind::Guess:
        s = live[n.next];
        s.erase(n.var);
        break;
      case Program::Kind::Jump:
        s = live[n.next];
        break;
      case Program::Kind::Or:
      case Program::Kind::And:
        for (int k : n.kids)
          s.insert(live[k].begin(), live[k].end());
        break;
      default:
        break;
      }
      if (s != live[i]) {
        live[i] = std::move(s);
        changed = true;
      }
    }
  }
  return live;
}

// nodes from which yes may still be reached
std::vector<char> can_accept(const Program &p) {
  std::vector<char> ok(p.nodes.size(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      if (ok[i])
        continue;
      const auto &n = p.nodes[i];
      bool r = false;
      switch (n.kind) {
      case Program::Kind::Yes:
      case Program::Kind::AcceptAtEnd:
      case Program::Kind::ReadUniv:
        r = true;
        break;
      case Program::Kind::End:
        break;
      case Program::Kind::Read:
      case Program::Kind::Guess:
      case Program::Kind::Jump:
        r = ok[n.next];
        break;
      case Program::Kind::Or:
        r = std::any_of(n.kids.begin(), n.kids.end(), [&](int k) { return ok[k]; });
        break;
      case Program::Kind::And:
        r = std::all_of(n.kids.begin(), n.kids.end(), [&](int k) { return ok[k]; });
        break;
      }
      if (r) {
        ok[i] = 1;
        changed = true;
      }
    }
  }
  return ok;
}

} // namespace

Engine::Engine(std::shared_ptr<const Program> p) : p_(std::move(p)), can_accept_(can_accept(*p_)) {
  for (const auto &s : live_vars(*p_)) {
    std::vector<char> mask(p_->vars.size(), 0);
    for (int v : s)
      mask[v] = 1;
    live_.push_back(std::move(mask));
  }
}

CTree Engine::expand(int node, std::vector<Val> env, Config &c, std::vector<int> &stack) const {
  const auto &n = p_->nodes[node];
  if (std::find(stack.begin(), stack.end(), node) != stack.end()) {
    if (p_->automaton_mode)
      return leaf(kEnd);
    throw DomainError("monitor diverges: recursion not under a guard");
  }
  switch (n.kind) {
  case Program::Kind::Yes:
    return leaf(kYes);
  case Program::Kind::End:
    return leaf(kEnd);
  case Program::Kind::AcceptAtEnd:
  case Program::Kind::Read:
  case Program::Kind::ReadUniv:
    if (!can_accept_[node])
      return leaf(kEnd);
    // values no later guard can read are forgotten
    for (std::size_t v = 0; v < env.size(); ++v)
      if (!live_[node][v])
        env[v] = Val{-1, {}};
    return leaf(node, std::move(env));
  case Program::Kind::Jump: {
    stack.push_back(node);
    CTree t = expand(n.next, std::move(env), c, stack);
    stack.pop_back();
    return t;
  }
  case Program::Kind::Guess: {
    int id = c.syms.empty() ? 0 : c.syms.rbegin()->first + 1;
    c.syms[id];
    env[n.var] = Val{id, {}};
    stack.push_back(node);
    CTree t = expand(n.next, std::move(env), c, stack);
    stack.pop_back();
    return t;
  }
  case Program::Kind::Or:
  case Program::Kind::And: {
    CTree t;
    t.kind = n.kind == Program::Kind::Or ? CTree::Kind::Or : CTree::Kind::And;
    stack.push_back(node);
    for (int k : n.kids)
      t.kids.push_back(expand(k, env, c, stack));
    stack.pop_back();
    return t;
  }
  }
  return leaf(kEnd);
}

void Engine::finish(Config &c, std::vector<Config> &out, std::unordered_set<std::string> &seen) const {
  c.root = simplify(std::move(c.root));
  if (is_end(c.root))
    return;
  sort_anon(c.root);
  std::vector<int> order;
  std::set<int> used;
  collect_syms(c.root, order, used);
  std::map<int, int> renum;
  for (std::size_t i = 0; i < order.size(); ++i)
    renum[order[i]] = static_cast<int>(i);
  std::map<int, Sym> syms;
  for (const auto &[id, s] : c.syms) {
    auto it = renum.find(id);
    if (it == renum.end())
      continue;
    Sym ns;
    ns.excl = s.excl;
    for (int d : s.diseq) {
      auto jt = renum.find(d);
      if (jt != renum.end())
        ns.diseq.insert(jt->second);
    }
    syms[it->second] = std::move(ns);
  }
  rename_syms(c.root, renum);
  c.syms = std::move(syms);
  std::string k = key(c);
  if (seen.insert(k).second)
    out.push_back(std::move(c));
}

std::string Engine::key(const Config &c) const {
  std::string k;
  std::map<int, int> id;
  for (const auto &[s, _] : c.syms)
    id[s] = s;
  tree_key(c.root, k, &id);
  k += "|";
  for (const auto &[s, info] : c.syms) {
    k += std::to_string(s) + "{";
    for (const auto &e : info.excl)
      k += std::to_string(e.size()) + ":" + e + ",";
    k += "/";
    for (int d : info.diseq)
      k += std::to_string(d) + ",";
    k += "}";
  }
  return k;
}

std::vector<Config> Engine::initial() const {
  Config c;
  std::vector<Val> env;
  for (const auto &v : p_->vars)
    env.push_back(Val{-1, kSentinelPrefix + v});
  std::vector<int> stack;
  c.root = expand(p_->root, std::move(env), c, stack);
  std::vector<Config> out;
  std::unordered_set<std::string> seen;
  finish(c, out, seen);
  return out;
}

bool Engine::has_yes(const std::vector<Config> &cs) {
  return std::any_of(cs.begin(), cs.end(), [](const Config &c) { return is_yes(c.root); });
}

bool Engine::accepts_at_end(const std::vector<Config> &cs) const {
  std::function<bool(const CTree &)> ev = [&](const CTree &t) -> bool {
    switch (t.kind) {
    case CTree::Kind::Leaf:
      return t.node == kYes || (t.node >= 0 && p_->nodes[t.node].kind == Program::Kind::AcceptAtEnd);
    case CTree::Kind::Or:
      return std::any_of(t.kids.begin(), t.kids.end(), ev);
    case CTree::Kind::And:
      return std::all_of(t.kids.begin(), t.kids.end(), ev);
    }
    return false;
  };
  return std::any_of(cs.begin(), cs.end(), [&](const Config &c) { return ev(c.root); });
}

std::vector<Config> Engine::step(const std::vector<Config> &cs, const DataValue &d) const {
  std::vector<Config> out;
  std::unordered_set<std::string> seen;
  for (const Config &c0 : cs) {
    if (is_yes(c0.root)) {
      Config c = c0;
      finish(c, out, seen);
      continue;
    }
    Config base = c0;
    std::vector<CTree *> ls;
    leaves(base.root, ls);
    // symbols and concrete values read by guards
    std::vector<int> S;
    std::vector<DataValue> C{d};
    // symbols some guard compares with another variable
    std::set<int> paired;
    for (CTree *l : ls) {
      if (l->node < 0)
        continue;
      const auto &n = p_->nodes[l->node];
      if (n.kind != Program::Kind::Read && n.kind != Program::Kind::ReadUniv)
        continue;
      for (const auto &g : n.guard.nodes)
        if (g.kind == BExpr::Kind::Eq && g.l >= 0 && g.r >= 0)
          for (int v : {g.l, g.r})
            if (l->env[v].sym >= 0)
              paired.insert(l->env[v].sym);
      for (int v : n.guard.vars) {
        const Val &val = l->env[v];
        if (val.sym >= 0) {
          if (std::find(S.begin(), S.end(), val.sym) == S.end())
            S.push_back(val.sym);
        } else if (std::find(C.begin(), C.end(), val.conc) == C.end()) {
          C.push_back(val.conc);
        }
      }
    }
    std::sort(S.begin(), S.end());
    // assignment: >= 0 concrete index, < 0 block -(b+1)
    constexpr int kApart = INT_MIN;
    std::vector<int> asg(S.size());
    std::vector<std::vector<int>> blocks;
    std::function<void(std::size_t)> choose = [&](std::size_t i) {
      if (i == S.size()) {
        Config c = base;
        std::map<int, Val> sub;
        std::vector<int> reps;
        for (const auto &b : blocks)
          reps.push_back(b.front());
        for (std::size_t k = 0; k < S.size(); ++k)
          if (asg[k] != kApart)
            sub[S[k]] = asg[k] >= 0 ? Val{-1, C[asg[k]]} : Val{reps[-asg[k] - 1], {}};
        std::map<int, Sym> syms;
        auto map_diseq = [&](int u, Sym &into, int self) {
          auto it = sub.find(u);
          if (it == sub.end()) {
            into.diseq.insert(u);
          } else if (it->second.sym < 0) {
            into.excl.insert(it->second.conc);
          } else if (it->second.sym != self) {
            into.diseq.insert(it->second.sym);
          }
        };
        for (const auto &[id, s] : base.syms) {
          if (sub.count(id))
            continue;
          Sym ns;
          ns.excl = s.excl;
          // a symbol kept apart differs from the input
          if (std::find(S.begin(), S.end(), id) != S.end())
            ns.excl.insert(d);
          for (int u : s.diseq)
            map_diseq(u, ns, id);
          syms[id] = std::move(ns);
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          Sym ns;
          ns.excl.insert(C.begin(), C.end());
          for (int m : blocks[b]) {
            const Sym &s = base.syms.at(m);
            ns.excl.insert(s.excl.begin(), s.excl.end());
            for (int u : s.diseq)
              map_diseq(u, ns, reps[b]);
          }
          for (std::size_t o = 0; o < blocks.size(); ++o)
            if (o != b)
              ns.diseq.insert(reps[o]);
          syms[reps[b]] = std::move(ns);
        }
        c.syms = std::move(syms);
        subst_tree(c.root, sub);
        // fire the guards
        std::vector<CTree *> cl;
        leaves(c.root, cl);
        std::map<DataValue, int> ids;
        auto idof = [&](const Val &v) -> int {
          if (v.sym >= 0)
            return -2 - v.sym;
          return ids.emplace(v.conc, static_cast<int>(ids.size())).first->second;
        };
        int cur = idof(Val{-1, d});
        for (CTree *l : cl) {
          if (l->node < 0)
            continue;
          const auto &n = p_->nodes[l->node];
          if (n.kind == Program::Kind::AcceptAtEnd) {
            *l = leaf(kEnd);
            continue;
          }
          bool holds = n.guard.eval([&](int v) { return idof(l->env[v]); }, cur);
          if (holds) {
            std::vector<int> stack;
            *l = expand(n.next, std::move(l->env), c, stack);
          } else {
            *l = leaf(n.kind == Program::Kind::Read ? kEnd : kYes);
          }
        }
        finish(c, out, seen);
        return;
      }
      int s = S[i];
      const Sym &info = base.syms.at(s);
      if (!paired.count(s)) {
        // only compared with the input: equal to it or kept apart
        bool clash = info.excl.count(d) > 0;
        for (std::size_t j = 0; j < i; ++j)
          if (asg[j] == 0 && info.diseq.count(S[j]))
            clash = true;
        if (!clash) {
          asg[i] = 0;
          choose(i + 1);
        }
        asg[i] = kApart;
        choose(i + 1);
        return;
      }
      for (std::size_t k = 0; k < C.size(); ++k) {
        if (info.excl.count(C[k]))
          continue;
        bool clash = false;
        for (std::size_t j = 0; j < i; ++j)
          if (asg[j] == static_cast<int>(k) && info.diseq.count(S[j]))
            clash = true;
        if (clash)
          continue;
        asg[i] = static_cast<int>(k);
        choose(i + 1);
      }
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        bool clash = false;
        for (int m : blocks[b])
          if (info.diseq.count(m))
            clash = true;
        if (clash)
          continue;
        asg[i] = -static_cast<int>(b) - 1;
        blocks[b].push_back(s);
        choose(i + 1);
        blocks[b].pop_back();
      }
      asg[i] = -static_cast<int>(blocks.size()) - 1;
      blocks.push_back({s});
      choose(i + 1);
      blocks.pop_back();
    };
    choose(0);
  }
  return out;
}

Verdict run(const MonitorPtr &m, const Trace &w) {
  MonitorSession s(m);
  for (const auto &d : w)
    if (s.push(d))
      break;
  return s.verdict();
}

MonitorSession::MonitorSession(const MonitorPtr &m)
    : eng_(std::make_shared<const Program>(compile_monitor(m))) {
  cs_ = eng_.initial();
  verdict_.configs_peak = cs_.size();
  if (Engine::has_yes(cs_))
    verdict_.accepted = true;
}

bool MonitorSession::push(const DataValue &d) {
  if (verdict_.accepted)
    return true;
  ++consumed_;
  cs_ = eng_.step(cs_, d);
  verdict_.configs_peak = std::max(verdict_.configs_peak, cs_.size());
  if (Engine::has_yes(cs_)) {
    verdict_.accepted = true;
    verdict_.index = consumed_;
    cs_.erase(std::remove_if(cs_.begin(), cs_.end(), [](const Config &c) { return !is_yes(c.root); }), cs_.end());
  }
  return verdict_.accepted;
}

} // namespace datamon
