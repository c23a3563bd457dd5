#include "datamon/fragments.hpp"
#include "datamon/ra.hpp"

#include <algorithm>

namespace datamon {

ValType normalize_type(const std::vector<int> &block, const std::vector<bool> &sentinel) {
  ValType t;
  std::map<int, int> renum;
  for (int b : block) {
    auto [it, fresh] = renum.emplace(b, static_cast<int>(renum.size()));
    if (fresh)
      t.sentinel.push_back(b >= 0 && b < static_cast<int>(sentinel.size()) ? sentinel[b] : false);
    t.block.push_back(it->second);
  }
  return t;
}

std::string render_type(const ValType &t, const std::vector<std::string> &regs) {
  std::map<int, std::vector<std::string>> groups;
  for (std::size_t r = 0; r < t.block.size(); ++r)
    groups[t.block[r]].push_back(r < regs.size() ? regs[r] : std::to_string(r));
  std::string s;
  for (const auto &[b, rs] : groups) {
    s += s.empty() ? "{" : " {";
    for (std::size_t i = 0; i < rs.size(); ++i)
      s += (i ? "," : "") + rs[i];
    s += "}";
    if (t.sentinel[b])
      s += kSentinelPrefix;
  }
  return s;
}

bool Liveness::is_live(int loc, const ValType &t) const {
  auto it = live.find({loc, t});
  return it != live.end() && it->second;
}

namespace {

// all types over k registers
void all_types(std::size_t k, std::vector<ValType> &out) {
  std::vector<int> block(k);
  std::function<void(std::size_t, int)> part = [&](std::size_t i, int nb) {
    if (i == k) {
      for (int mask = 0; mask < (1 << nb); ++mask) {
        std::vector<bool> s(nb);
        for (int b = 0; b < nb; ++b)
          s[b] = (mask >> b) & 1;
        out.push_back(normalize_type(block, s));
      }
      return;
    }
    for (int b = 0; b <= nb; ++b) {
      block[i] = b;
      part(i + 1, std::max(nb, b + 1));
    }
  };
  part(0, 0);
}

bool guard_on_type(const BExprPtr &g, const RegisterAutomaton &a, const ValType &t, int star) {
  auto val = [&](const Term &term) {
    if (term.star)
      return star;
    auto it = std::find(a.registers.begin(), a.registers.end(), term.var);
    return t.block[it - a.registers.begin()];
  };
  std::function<bool(const BExprPtr &)> ev = [&](const BExprPtr &e) -> bool {
    switch (e->kind) {
    case BExpr::Kind::True:
      return true;
    case BExpr::Kind::Eq:
      return val(e->lhs) == val(e->rhs);
    case BExpr::Kind::Not:
      return !ev(e->a);
    case BExpr::Kind::And:
      return ev(e->a) && ev(e->b);
    }
    return false;
  };
  return ev(g);
}

std::vector<ValType> successors(const RegisterAutomaton &a, const RATransition &tr, const ValType &t) {
  std::vector<ValType> out;
  int nb = static_cast<int>(t.sentinel.size());
  switch (tr.kind) {
  case RATransition::Kind::Eps:
    out.push_back(t);
    break;
  case RATransition::Kind::Guard:
    // the input value lies in a non-sentinel block or is fresh
    for (int b = 0; b <= nb; ++b) {
      if (b < nb && t.sentinel[b])
        continue;
      if (guard_on_type(tr.guard, a, t, b)) {
        out.push_back(t);
        break;
      }
    }
    break;
  case RATransition::Kind::Guess: {
    std::size_t r = std::find(a.registers.begin(), a.registers.end(), tr.reg) - a.registers.begin();
    for (int b = 0; b <= nb; ++b) {
      std::vector<int> block = t.block;
      std::vector<bool> s = t.sentinel;
      s.push_back(false);
      block[r] = b;
      // joining the block it already forms alone is the same as fresh
      if (b < nb) {
        bool others = false;
        for (std::size_t q = 0; q < block.size(); ++q)
          if (q != r && block[q] == b)
            others = true;
        if (!others)
          continue;
      }
      out.push_back(normalize_type(block, s));
    }
    break;
  }
  }
  return out;
}

} // namespace

Liveness nra_liveness(const RegisterAutomaton &a) {
  a.validate();
  for (const auto &l : a.locations)
    if (l.universal)
      throw DomainError("liveness needs an automaton without universal locations");
  std::vector<ValType> types;
  all_types(a.registers.size(), types);
  std::map<std::pair<int, ValType>, std::vector<std::pair<int, ValType>>> pred;
  Liveness res;
  std::vector<std::pair<int, ValType>> todo;
  for (int l = 0; l < static_cast<int>(a.locations.size()); ++l)
    for (const auto &t : types) {
      bool acc = a.locations[l].accepting;
      res.live[{l, t}] = acc;
      if (acc)
        todo.push_back({l, t});
      for (const RATransition *tr : a.out(l))
        for (const auto &s : successors(a, *tr, t))
          pred[{tr->to, s}].push_back({l, t});
    }
  while (!todo.empty()) {
    auto cur = todo.back();
    todo.pop_back();
    for (const auto &p : pred[cur])
      if (!res.live[p]) {
        res.live[p] = true;
        todo.push_back(p);
      }
  }
  return res;
}

nlohmann::json liveness_to_json(const RegisterAutomaton &a, const Liveness &l) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &[k, v] : l.live)
    arr.push_back({{"location", k.first}, {"type", render_type(k.second, a.registers)}, {"live", v}});
  return arr;
}

ViolationDetector::ViolationDetector(const FormulaPtr &f) {
  if (!in_fragment(f, Fragment::disjHMLd))
    throw DomainError("violation detector: formula outside disjHMLd");
  ra_ = monitor_to_ra(synthesize(f));
  // eps edges of a disjunctive monitor only leave existential locations
  live_ = nra_liveness(ra_);
  auto prog = std::make_shared<const Program>(compile_ra(ra_));
  eng_ = std::make_unique<Engine>(prog);
  cs_ = eng_->initial();
  if (!any_alive()) {
    bad_ = true;
    bad_index_ = 0;
  }
}

bool ViolationDetector::any_alive() const {
  const Program &p = eng_->program();
  std::size_t k = ra_.registers.size();
  auto leaf_alive = [&](const CTree &t, const Config &c) -> bool {
    if (t.node < 0)
      return t.node == -1; // yes
    const auto &n = p.nodes[t.node];
    if (n.kind == Program::Kind::AcceptAtEnd)
      return true;
    if (n.kind != Program::Kind::Read)
      return false;
    int target = n.next;
    // enumerate the equality types the symbolic valuation may take
    std::vector<int> block(k, -1);
    std::vector<bool> sent;
    std::map<DataValue, int> conc;
    std::vector<std::size_t> symregs;
    for (std::size_t r = 0; r < k; ++r) {
      const Val &v = t.env[r];
      if (v.sym >= 0) {
        symregs.push_back(r);
        continue;
      }
      auto [it, fresh] = conc.emplace(v.conc, static_cast<int>(sent.size()));
      if (fresh)
        sent.push_back(is_sentinel(v.conc));
      block[r] = it->second;
    }
    std::map<int, int> symblock;
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
      if (i == symregs.size()) {
        ValType ty = normalize_type(block, sent);
        int nb = static_cast<int>(ty.sentinel.size());
        for (int b = 0; b <= nb; ++b) {
          if (b < nb && ty.sentinel[b])
            continue;
          if (guard_on_type(n.bguard, ra_, ty, b) && live_.is_live(target, ty))
            return true;
        }
        return false;
      }
      std::size_t r = symregs[i];
      int s = t.env[r].sym;
      auto known = symblock.find(s);
      if (known != symblock.end()) {
        block[r] = known->second;
        return go(i + 1);
      }
      const Sym &info = c.syms.at(s);
      std::vector<int> options;
      for (int b = 0; b < static_cast<int>(sent.size()); ++b) {
        bool ok = true;
        for (const auto &[val, b2] : conc)
          if (b2 == b && info.excl.count(val))
            ok = false;
        for (const auto &[other, b2] : symblock)
          if (b2 == b && info.diseq.count(other))
            ok = false;
        if (ok)
          options.push_back(b);
      }
      options.push_back(static_cast<int>(sent.size()));
      for (int b : options) {
        bool grown = b == static_cast<int>(sent.size());
        if (grown)
          sent.push_back(false);
        symblock[s] = b;
        block[r] = b;
        bool ok = go(i + 1);
        symblock.erase(s);
        if (grown)
          sent.pop_back();
        if (ok)
          return true;
      }
      return false;
    };
    return go(0);
  };
  std::function<bool(const CTree &, const Config &)> alive = [&](const CTree &t, const Config &c) -> bool {
    if (t.kind == CTree::Kind::Leaf)
      return leaf_alive(t, c);
    if (t.kind == CTree::Kind::Or)
      return std::any_of(t.kids.begin(), t.kids.end(), [&](const CTree &x) { return alive(x, c); });
    return std::all_of(t.kids.begin(), t.kids.end(), [&](const CTree &x) { return alive(x, c); });
  };
  return std::any_of(cs_.begin(), cs_.end(), [&](const Config &c) { return alive(c.root, c); });
}

bool ViolationDetector::push(const DataValue &d) {
  if (bad_)
    return true;
  ++consumed_;
  cs_ = eng_->step(cs_, d);
  if (!any_alive()) {
    bad_ = true;
    bad_index_ = consumed_;
  }
  return bad_;
}

OptimalVerdict run_optimal(const FormulaPtr &f, const Trace &w) {
  OptimalVerdict v;
  ViolationDetector det(f);
  MonitorSession mon(synthesize(f));
  if (mon.accepted()) {
    v.accepted = true;
    return v;
  }
  if (det.bad()) {
    v.rejected = true;
    return v;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (mon.push(w[i])) {
      v.accepted = true;
      v.index = i + 1;
      return v;
    }
    if (det.push(w[i])) {
      v.rejected = true;
      v.index = i + 1;
      return v;
    }
  }
  return v;
}

} // namespace datamon
