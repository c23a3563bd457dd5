#include "datamon/fragments.hpp"
#include "datamon/oracle.hpp"
#include "graph.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <unordered_map>

namespace datamon {

namespace detail {

// Proof search for guarded formulas.  In lasso mode positions wrap around
// the loop; in prefix mode position n (the prefix length) stands for every
// later position, and a result there holds on every continuation.
class GuardedSearch {
public:
  using Env = std::vector<int>;

  struct Key {
    int node;
    int pos;
    Env env;
  };

  struct Proof {
    std::vector<Key> kids;
    bool witness = false;
    std::vector<int> D;
    int d_star = -1;
  };

  GuardedSearch(const FormulaPtr &f, const DataEnv &env0, bool lasso_mode)
      : lasso_mode_(lasso_mode) {
    nf_ = normalize(f, true).formula;
    std::vector<std::string> extra;
    for (const auto &[k, v] : env0)
      extra.push_back(k);
    flat_ = FlatFormula::build(nf_, extra);
    root_env_.assign(flat_.vars.size(), -1);
    for (const auto &[k, v] : env0) {
      int id = intern(v);
      root_env_[flat_.var_index(k)] = id;
      base_.insert(id);
    }
  }

  void set_lasso(const Lasso &t) {
    lasso_ = t;
    for (std::size_t p = 0; p < t.size(); ++p) {
      tr_.push_back(intern(t.at(p)));
      base_.insert(tr_.back());
    }
  }

  void push(const DataValue &d) {
    tr_.push_back(intern(d));
    base_.insert(tr_.back());
    failed_.clear();
  }

  std::size_t length() const { return tr_.size(); }
  const FlatFormula &flat() const { return flat_; }
  const FormulaPtr &formula() const { return nf_; }

  // throws BudgetExceeded once more than cap states were expanded
  bool prove(std::size_t cap) {
    cap_ = cap;
    work_ = 0;
    // an overrun leaves its search stack behind
    onstack_.clear();
    return eval(0, 0, root_env_, 0).ok;
  }

  std::size_t work() const { return work_; }

  Annotation annotation() const {
    Annotation a;
    std::unordered_map<std::string, std::size_t> made;
    std::function<std::size_t(const Key &)> build = [&](const Key &k) -> std::size_t {
      std::string s = key(k.node, k.pos, k.env);
      auto it = made.find(s);
      if (it != made.end())
        return it->second;
      std::size_t id = a.nodes.size();
      a.nodes.push_back({flat_.nodes[k.node].path, data_env(k.env), static_cast<std::size_t>(k.pos)});
      made.emplace(s, id);
      const Proof &p = proven_.at(s);
      if (p.witness) {
        GforallWitness w;
        for (int d : p.D)
          w.D.push_back(names_[d]);
        w.d_star = names_[p.d_star];
        a.witnesses[id] = w;
      }
      for (const Key &c : p.kids) {
        std::size_t cid = build(c);
        a.edges.emplace_back(id, cid);
      }
      return id;
    };
    build({0, 0, root_env_});
    return a;
  }

private:
  struct Res {
    bool ok;
    int low;
  };

  FormulaPtr nf_;
  FlatFormula flat_;
  bool lasso_mode_;
  Lasso lasso_;
  std::vector<int> tr_;
  std::set<int> base_;
  std::vector<DataValue> names_;
  std::map<DataValue, int> ids_;
  Env root_env_;
  std::unordered_map<std::string, Proof> proven_;
  std::unordered_map<std::string, char> failed_;
  std::unordered_map<std::string, int> onstack_;
  std::size_t cap_ = 0;
  std::size_t work_ = 0;

  int intern(const DataValue &v) {
    auto [it, fresh] = ids_.emplace(v, static_cast<int>(names_.size()));
    if (fresh)
      names_.push_back(v);
    return it->second;
  }

  DataEnv data_env(const Env &e) const {
    DataEnv out;
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] >= 0)
        out[flat_.vars[v]] = names_[e[v]];
    return out;
  }

  static std::string key(int node, int pos, const Env &env) {
    std::string s = std::to_string(node) + ":" + std::to_string(pos);
    for (int v : env)
      s += "," + std::to_string(v);
    return s;
  }

  bool boundary(int pos) const { return !lasso_mode_ && pos == static_cast<int>(tr_.size()); }

  int next(int pos) const {
    if (lasso_mode_)
      return static_cast<int>(lasso_.next(static_cast<std::size_t>(pos)));
    return pos + 1;
  }

  int fresh(const Env &env) {
    for (int k = 0;; ++k) {
      int id = intern("⊥f" + std::to_string(k));
      if (std::find(env.begin(), env.end(), id) == env.end())
        return id;
    }
  }

  std::vector<int> domain(const Env &env) {
    std::set<int> d = base_;
    for (int v : env)
      if (v >= 0)
        d.insert(v);
    std::vector<int> out(d.begin(), d.end());
    out.push_back(fresh(env));
    return out;
  }

  // guard value over every current value: env values and one fresh value
  std::pair<bool, bool> guard_range(const GuardCode &g, const Env &env) const {
    auto val = [&](int slot) { return env[slot]; };
    bool some = false, all = true;
    std::vector<int> tests{INT_MIN};
    for (int s : g.vars)
      tests.push_back(env[s]);
    for (int c : tests) {
      bool r = g.eval(val, c);
      some = some || r;
      all = all && r;
    }
    return {some, all};
  }

  std::vector<int> star_reads(const Key &from) const {
    std::set<int> out;
    std::set<std::string> seen;
    std::vector<Key> todo{from};
    while (!todo.empty()) {
      Key k = todo.back();
      todo.pop_back();
      std::string s = key(k.node, k.pos, k.env);
      if (!seen.insert(s).second)
        continue;
      const FlatNode &n = flat_.nodes[k.node];
      if ((n.kind == FKind::Diamond || n.kind == FKind::Box) && n.guard.star)
        out.insert(tr_[k.pos]);
      auto it = proven_.find(s);
      if (it != proven_.end())
        for (const Key &c : it->second.kids)
          todo.push_back(c);
    }
    return {out.begin(), out.end()};
  }

  Res eval(int node, int pos, const Env &env, int depth) {
    std::string k = key(node, pos, env);
    if (proven_.count(k))
      return {true, INT_MAX};
    if (failed_.count(k))
      return {false, INT_MAX};
    auto on = onstack_.find(k);
    if (on != onstack_.end())
      return {false, on->second};
    if (++work_ > cap_)
      throw BudgetExceeded("guarded search exceeded its state budget");
    onstack_[k] = depth;
    Proof proof;
    int low = INT_MAX;
    auto sub = [&](int c, int p, const Env &e) -> bool {
      Res r = eval(c, p, e, depth + 1);
      low = std::min(low, r.low);
      if (r.ok)
        proof.kids.push_back({c, p, e});
      return r.ok;
    };
    const FlatNode &n = flat_.nodes[node];
    auto val = [&](int slot) { return env[slot]; };
    bool ok = false;
    switch (n.kind) {
    case FKind::Tt:
      ok = true;
      break;
    case FKind::Ff:
      break;
    case FKind::Diamond:
      if (boundary(pos))
        ok = guard_range(n.guard, env).second && sub(n.a, pos, env);
      else
        ok = n.guard.eval(val, tr_[pos]) && sub(n.a, next(pos), env);
      break;
    case FKind::Box:
      if (boundary(pos))
        ok = !guard_range(n.guard, env).first || sub(n.a, pos, env);
      else
        ok = !n.guard.eval(val, tr_[pos]) || sub(n.a, next(pos), env);
      break;
    case FKind::Or:
      ok = sub(n.a, pos, env) || sub(n.b, pos, env);
      break;
    case FKind::And:
      ok = sub(n.a, pos, env) && sub(n.b, pos, env);
      break;
    case FKind::Min:
    case FKind::Max:
      ok = sub(n.a, pos, env);
      break;
    case FKind::RecVar:
      ok = sub(n.binder, pos, env);
      break;
    case FKind::Exists:
      for (int d : domain(env)) {
        Env e = env;
        e[n.var] = d;
        if (sub(n.a, pos, e)) {
          ok = true;
          break;
        }
      }
      break;
    case FKind::Forall:
      ok = true;
      for (int d : domain(env)) {
        Env e = env;
        e[n.var] = d;
        if (!sub(n.a, pos, e)) {
          ok = false;
          break;
        }
      }
      break;
    case FKind::GForall: {
      Env e = env;
      int d_star = fresh(env);
      e[n.var] = d_star;
      if (!sub(n.a, pos, e))
        break;
      std::set<int> D;
      if (lasso_mode_) {
        for (int d : star_reads({n.a, pos, e}))
          D.insert(d);
      } else {
        D = base_;
      }
      for (int v : env)
        if (v >= 0)
          D.insert(v);
      ok = true;
      for (int d : D) {
        e[n.var] = d;
        bool neq = true;
        for (int y : n.frees)
          if (y != n.var && env[y] == d)
            neq = false;
        if (!sub(n.b, pos, e) && !(neq && sub(n.a, pos, e))) {
          ok = false;
          break;
        }
      }
      proof.witness = true;
      proof.D.assign(D.begin(), D.end());
      proof.d_star = d_star;
      break;
    }
    }
    onstack_.erase(k);
    if (ok) {
      proven_.emplace(k, std::move(proof));
      return {true, INT_MAX};
    }
    if (low >= depth) {
      failed_.emplace(k, 1);
      return {false, INT_MAX};
    }
    return {false, low};
  }
};

} // namespace detail

std::optional<Annotation> find_guarded_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t,
                                                  std::size_t budget) {
  std::vector<std::string> F;
  for (const auto &[k, v] : env0)
    F.push_back(k);
  FormulaPtr nf = normalize(f, true).formula;
  GuardedCheck gc = check_guarded(nf, {}, F);
  if (!gc.ok)
    throw DomainError("find_guarded_annotation: formula not guarded: " + gc.reason);
  detail::GuardedSearch s(nf, env0, true);
  s.set_lasso(t);
  if (!s.prove(budget ? budget : default_budget()))
    return std::nullopt;
  return s.annotation();
}

struct GuardedProver::Impl {
  detail::GuardedSearch search;
  std::size_t budget;
  Impl(const FormulaPtr &f, const DataEnv &env0, std::size_t b) : search(f, env0, false), budget(b) {}
};

GuardedProver::GuardedProver(const FormulaPtr &f, const DataEnv &env0, std::size_t budget)
    : impl_(std::make_unique<Impl>(f, env0, budget ? budget : default_budget())) {}
GuardedProver::~GuardedProver() = default;
GuardedProver::GuardedProver(GuardedProver &&) noexcept = default;
GuardedProver &GuardedProver::operator=(GuardedProver &&) noexcept = default;

void GuardedProver::push(const DataValue &d) { impl_->search.push(d); }

std::size_t GuardedProver::length() const { return impl_->search.length(); }

GoodPrefixResult GuardedProver::check() {
  GoodPrefixResult r;
  // no claim before the first event
  if (impl_->search.length() == 0)
    return r;
  try {
    if (impl_->search.prove(impl_->budget))
      r.verdict = PrefixVerdict::Good;
  } catch (const BudgetExceeded &) {
    r.budget_exhausted = true;
  }
  r.states = impl_->search.work();
  return r;
}

GoodPrefixResult good_prefix_guarded(const FormulaPtr &f, const Trace &w, const DataEnv &env0, std::size_t budget) {
  GuardedProver p(f, env0, budget);
  for (const auto &d : w)
    p.push(d);
  return p.check();
}

} // namespace datamon
