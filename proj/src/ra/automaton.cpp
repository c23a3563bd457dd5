#include "datamon/ra.hpp"

#include <algorithm>
#include <deque>

namespace datamon {

void RegisterAutomaton::validate() const {
  int n = static_cast<int>(locations.size());
  if (n == 0)
    throw DomainError("automaton has no locations");
  if (initial < 0 || initial >= n)
    throw DomainError("initial location out of range");
  std::set<std::string> regs(registers.begin(), registers.end());
  for (const auto &t : transitions) {
    if (t.from < 0 || t.from >= n || t.to < 0 || t.to >= n)
      throw DomainError("transition endpoint out of range");
    if (t.kind == RATransition::Kind::Guess) {
      if (locations[t.from].universal)
        throw DomainError("guessing transition from universal location " + std::to_string(t.from));
      if (!regs.count(t.reg))
        throw DomainError("guess into unknown register " + t.reg);
    }
    if (t.kind == RATransition::Kind::Guard) {
      std::set<std::string> vs;
      bexpr_vars(t.guard, vs);
      for (const auto &v : vs)
        if (!regs.count(v))
          throw DomainError("guard mentions unknown register " + v);
    }
  }
}

std::vector<const RATransition *> RegisterAutomaton::out(int loc) const {
  std::vector<const RATransition *> r;
  for (const auto &t : transitions)
    if (t.from == loc)
      r.push_back(&t);
  return r;
}

nlohmann::json ra_to_json(const RegisterAutomaton &a) {
  nlohmann::json locs = nlohmann::json::array();
  for (std::size_t i = 0; i < a.locations.size(); ++i) {
    const auto &l = a.locations[i];
    locs.push_back({{"id", i},
                    {"kind", l.universal ? "universal" : "existential"},
                    {"accepting", l.accepting},
                    {"label", l.label}});
  }
  nlohmann::json ts = nlohmann::json::array();
  for (const auto &t : a.transitions) {
    nlohmann::json j{{"from", t.from}, {"to", t.to}};
    switch (t.kind) {
    case RATransition::Kind::Guard:
      j["guard"] = render_bexpr(t.guard);
      break;
    case RATransition::Kind::Guess:
      j["guess"] = t.reg;
      break;
    case RATransition::Kind::Eps:
      j["eps"] = true;
      break;
    }
    ts.push_back(j);
  }
  return {{"locations", locs}, {"registers", a.registers}, {"initial", a.initial}, {"transitions", ts}};
}

RegisterAutomaton ra_from_json(const nlohmann::json &j) {
  RegisterAutomaton a;
  try {
    std::map<int, int> ids;
    for (const auto &l : j.at("locations")) {
      RALocation loc;
      std::string kind = l.value("kind", "existential");
      if (kind != "existential" && kind != "universal")
        throw DomainError("unknown location kind " + kind);
      loc.universal = kind == "universal";
      loc.accepting = l.value("accepting", false);
      loc.label = l.value("label", "");
      int id = l.contains("id") ? l.at("id").get<int>() : static_cast<int>(a.locations.size());
      if (!ids.emplace(id, static_cast<int>(a.locations.size())).second)
        throw DomainError("duplicate location id " + std::to_string(id));
      a.locations.push_back(loc);
    }
    auto loc = [&](const nlohmann::json &v) {
      auto it = ids.find(v.get<int>());
      if (it == ids.end())
        throw DomainError("unknown location " + v.dump());
      return it->second;
    };
    a.registers = j.value("registers", std::vector<std::string>{});
    a.initial = loc(j.at("initial"));
    for (const auto &t : j.at("transitions")) {
      RATransition tr;
      tr.from = loc(t.at("from"));
      tr.to = loc(t.at("to"));
      if (t.contains("guard")) {
        tr.kind = RATransition::Kind::Guard;
        std::string g = t.at("guard").get<std::string>();
        tr.guard = g.find_first_not_of(" \t") == std::string::npos ? b_true() : parse_bexpr(g);
      } else if (t.contains("guess")) {
        tr.kind = RATransition::Kind::Guess;
        tr.reg = t.at("guess").get<std::string>();
      } else if (t.value("eps", false)) {
        tr.kind = RATransition::Kind::Eps;
      } else {
        throw DomainError("transition needs guard, guess or eps");
      }
      a.transitions.push_back(tr);
    }
  } catch (const nlohmann::json::exception &e) {
    throw DomainError(std::string("malformed automaton: ") + e.what());
  } catch (const SyntaxError &e) {
    throw DomainError(std::string("malformed guard: ") + e.what());
  }
  a.validate();
  return a;
}

RegisterAutomaton monitor_to_ra(const MonitorPtr &m) {
  RegisterAutomaton a;
  auto vars = monitor_data_vars(m);
  a.registers.assign(vars.begin(), vars.end());
  std::vector<std::pair<std::string, int>> scope;
  auto add = [&](const MonitorPtr &n, bool universal, bool accepting) {
    a.locations.push_back({universal, accepting, render_monitor(n)});
    return static_cast<int>(a.locations.size()) - 1;
  };
  auto edge = [&](int from, int to, RATransition::Kind k, BExprPtr g = nullptr, std::string r = {}) {
    a.transitions.push_back({from, to, k, std::move(g), std::move(r)});
  };
  std::function<int(const MonitorPtr &)> go = [&](const MonitorPtr &n) -> int {
    switch (n->kind) {
    case MKind::Yes: {
      int id = add(n, false, true);
      edge(id, id, RATransition::Kind::Guard, b_true());
      return id;
    }
    case MKind::End:
      return add(n, false, false);
    case MKind::Guard: {
      int id = add(n, false, false);
      int c = go(n->a);
      edge(id, c, RATransition::Kind::Guard, n->guard);
      return id;
    }
    case MKind::Guess: {
      int id = add(n, false, false);
      int c = go(n->a);
      edge(id, c, RATransition::Kind::Guess, nullptr, n->name);
      return id;
    }
    case MKind::Or:
    case MKind::And: {
      int id = add(n, n->kind == MKind::And, false);
      int l = go(n->a);
      int r = go(n->b);
      edge(id, l, RATransition::Kind::Eps);
      edge(id, r, RATransition::Kind::Eps);
      return id;
    }
    case MKind::Rec: {
      int id = add(n, false, false);
      scope.emplace_back(n->name, id);
      int c = go(n->a);
      scope.pop_back();
      edge(id, c, RATransition::Kind::Eps);
      return id;
    }
    case MKind::Var:
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == n->name)
          return it->second;
      throw DomainError("monitor has free recursion variable " + n->name);
    }
    return -1;
  };
  a.initial = go(m);
  return a;
}

Program compile_ra(const RegisterAutomaton &a) {
  a.validate();
  Program p;
  p.automaton_mode = true;
  for (const auto &r : a.registers)
    p.var_index(r);
  int n = static_cast<int>(a.locations.size());
  // node i is the entry of location i
  p.nodes.resize(n);
  auto add = [&](Program::Kind k, int tag) {
    Program::Node nd;
    nd.kind = k;
    nd.tag = tag;
    p.nodes.push_back(std::move(nd));
    return static_cast<int>(p.nodes.size()) - 1;
  };
  auto compile = [&](Program::Node &nd, const BExprPtr &g) {
    nd.bguard = g;
    nd.guard = compile_guard(g, [&](const std::string &v) { return p.var_index(v); });
  };
  for (int l = 0; l < n; ++l) {
    const RALocation &loc = a.locations[l];
    std::vector<int> kids, reads;
    for (const RATransition *t : a.out(l)) {
      switch (t->kind) {
      case RATransition::Kind::Eps: {
        int k = add(Program::Kind::Jump, l);
        p.nodes[k].next = t->to;
        kids.push_back(k);
        break;
      }
      case RATransition::Kind::Guess: {
        int k = add(Program::Kind::Guess, l);
        p.nodes[k].var = p.var_index(t->reg);
        p.nodes[k].next = t->to;
        kids.push_back(k);
        break;
      }
      case RATransition::Kind::Guard: {
        int k = add(loc.universal ? Program::Kind::ReadUniv : Program::Kind::Read, l);
        compile(p.nodes[k], t->guard);
        p.nodes[k].next = t->to;
        (loc.universal ? reads : kids).push_back(k);
        break;
      }
      }
    }
    Program::Node &entry = p.nodes[l];
    entry.tag = l;
    if (!loc.universal) {
      if (loc.accepting)
        kids.insert(kids.begin(), add(Program::Kind::AcceptAtEnd, l));
      p.nodes[l].kind = Program::Kind::Or;
      p.nodes[l].kids = kids;
      continue;
    }
    if (!reads.empty()) {
      if (loc.accepting) {
        int all = add(Program::Kind::And, l);
        p.nodes[all].kids = reads;
        int acc = add(Program::Kind::AcceptAtEnd, l);
        int either = add(Program::Kind::Or, l);
        p.nodes[either].kids = {acc, all};
        kids.push_back(either);
      } else {
        kids.insert(kids.end(), reads.begin(), reads.end());
      }
    }
    p.nodes[l].kind = Program::Kind::And;
    p.nodes[l].kids = kids;
  }
  p.root = a.initial;
  return p;
}

bool ra_member(const RegisterAutomaton &a, const Trace &w) {
  Engine eng(std::make_shared<const Program>(compile_ra(a)));
  auto cs = eng.initial();
  for (const auto &d : w) {
    if (Engine::has_yes(cs))
      return true;
    cs = eng.step(cs, d);
    if (cs.empty())
      return false;
  }
  return eng.accepts_at_end(cs);
}

bool ra_member_prefix(const RegisterAutomaton &a, const Trace &w) {
  Engine eng(std::make_shared<const Program>(compile_ra(a)));
  auto cs = eng.initial();
  if (eng.accepts_at_end(cs))
    return true;
  for (const auto &d : w) {
    cs = eng.step(cs, d);
    if (eng.accepts_at_end(cs))
      return true;
    if (cs.empty())
      return false;
  }
  return false;
}

RegisterAutomaton unravel(const RegisterAutomaton &a) {
  a.validate();
  RegisterAutomaton u;
  u.registers = a.registers;
  std::map<std::vector<int>, int> ids;
  std::deque<std::vector<int>> todo;
  auto get = [&](const std::vector<int> &path) {
    auto it = ids.find(path);
    if (it != ids.end())
      return it->second;
    RALocation loc = a.locations[path.back()];
    std::string label;
    for (int l : path)
      label += (label.empty() ? "" : ".") + std::to_string(l);
    loc.label = label;
    u.locations.push_back(loc);
    int id = static_cast<int>(u.locations.size()) - 1;
    ids.emplace(path, id);
    todo.push_back(path);
    return id;
  };
  u.initial = get({a.initial});
  while (!todo.empty()) {
    std::vector<int> path = todo.front();
    todo.pop_front();
    int from = ids.at(path);
    for (const RATransition *t : a.out(path.back())) {
      std::vector<int> next = path;
      auto it = std::find(next.begin(), next.end(), t->to);
      if (it != next.end())
        next.erase(it + 1, next.end());
      else
        next.push_back(t->to);
      RATransition nt = *t;
      nt.from = from;
      nt.to = get(next);
      u.transitions.push_back(nt);
    }
  }
  return u;
}

bool ra_irrevocable(const RegisterAutomaton &a) {
  for (std::size_t l = 0; l < a.locations.size(); ++l) {
    if (!a.locations[l].accepting)
      continue;
    if (a.locations[l].universal)
      return false;
    bool loop = false;
    for (const RATransition *t : a.out(static_cast<int>(l)))
      if (t->kind == RATransition::Kind::Guard && t->to == static_cast<int>(l) &&
          t->guard->kind == BExpr::Kind::True)
        loop = true;
    if (!loop)
      return false;
  }
  return true;
}

MonitorPtr ra_to_monitor(const RegisterAutomaton &a) {
  a.validate();
  for (const auto &t : a.transitions)
    if (t.kind == RATransition::Kind::Guess && a.locations[t.from].universal)
      throw DomainError("universal location with a guessing transition");
  if (!ra_irrevocable(a))
    throw DomainError("automaton is not irrevocable: accepting locations need a true self-loop");
  struct Entry {
    int loc;
    int reads;
    bool used;
  };
  std::vector<Entry> stack;
  auto name = [](int loc) { return "L" + std::to_string(loc); };
  std::function<MonitorPtr(int, int)> build = [&](int loc, int reads) -> MonitorPtr {
    const RALocation &L = a.locations[loc];
    if (L.accepting)
      return m_yes();
    stack.push_back({loc, reads, false});
    std::size_t me = stack.size() - 1;
    std::vector<MonitorPtr> parts;
    for (const RATransition *t : a.out(loc)) {
      int r2 = reads + (t->kind == RATransition::Kind::Guard ? 1 : 0);
      MonitorPtr child;
      auto on = std::find_if(stack.begin(), stack.end(), [&](const Entry &e) { return e.loc == t->to; });
      if (on != stack.end()) {
        if (r2 > on->reads) {
          on->used = true;
          child = m_var(name(t->to));
        } else {
          // a cycle without reading never reaches a final state
          child = m_end();
        }
      } else {
        child = build(t->to, r2);
      }
      switch (t->kind) {
      case RATransition::Kind::Guard:
        if (L.universal)
          parts.push_back(m_or(m_guard(t->guard, child), m_guard(b_not(t->guard), m_yes())));
        else
          parts.push_back(m_guard(t->guard, child));
        break;
      case RATransition::Kind::Guess:
        parts.push_back(m_guess(t->reg, child));
        break;
      case RATransition::Kind::Eps:
        parts.push_back(child);
        break;
      }
    }
    MonitorPtr body;
    if (parts.empty()) {
      body = L.universal ? m_yes() : m_end();
    } else {
      body = parts.front();
      for (std::size_t i = 1; i < parts.size(); ++i)
        body = L.universal ? m_and(body, parts[i]) : m_or(body, parts[i]);
    }
    bool used = stack[me].used;
    stack.pop_back();
    return used ? m_rec(name(loc), body) : body;
  };
  return build(a.initial, 0);
}

} // namespace datamon
