#pragma once

// Test-side reference semantics and enumeration helpers.  Nothing here calls
// the evaluation code under test.

#include "datamon/core.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testsupport {

using namespace datamon;

// Textbook evaluation on a lasso: quantifiers range over the lasso values,
// the environment values and fresh values; fixpoints by Kleene iteration
// over every (environment, position) pair of their free variables.
class RefEval {
public:
  RefEval(const Lasso &t, const DataEnv &env0, std::size_t fresh) : t_(t) {
    std::set<DataValue> d;
    for (const auto &v : t.prefix)
      d.insert(v);
    for (const auto &v : t.loop)
      d.insert(v);
    for (const auto &[k, v] : env0)
      d.insert(v);
    dom_.assign(d.begin(), d.end());
    for (std::size_t i = 0; i < fresh; ++i)
      dom_.push_back("fresh_" + std::to_string(i));
  }

  bool holds(const FormulaPtr &f, const DataEnv &env) {
    Rho rho;
    return eval(f, env, 0, rho);
  }

private:
  using Point = std::pair<DataEnv, std::size_t>;
  struct Fix {
    std::vector<std::string> fv;
    std::set<Point> sat;
  };
  using Rho = std::map<std::string, Fix>;

  const Lasso &t_;
  std::vector<DataValue> dom_;

  std::size_t next(std::size_t pos) const { return pos + 1 < t_.size() ? pos + 1 : t_.prefix.size(); }
  const DataValue &at(std::size_t pos) const {
    return pos < t_.prefix.size() ? t_.prefix[pos] : t_.loop[pos - t_.prefix.size()];
  }

  static DataEnv restrict(const DataEnv &env, const std::vector<std::string> &fv) {
    DataEnv out;
    for (const auto &v : fv)
      out[v] = env.at(v);
    return out;
  }

  void assignments(const std::vector<std::string> &fv, std::size_t i, DataEnv &cur, std::vector<DataEnv> &out) {
    if (i == fv.size()) {
      out.push_back(cur);
      return;
    }
    for (const auto &d : dom_) {
      cur[fv[i]] = d;
      assignments(fv, i + 1, cur, out);
    }
  }

  bool eval(const FormulaPtr &f, const DataEnv &env, std::size_t pos, Rho &rho) {
    switch (f->kind) {
    case FKind::Tt:
      return true;
    case FKind::Ff:
      return false;
    case FKind::Diamond:
      return eval_bexpr(f->guard, env, at(pos)) && eval(f->a, env, next(pos), rho);
    case FKind::Box:
      return !eval_bexpr(f->guard, env, at(pos)) || eval(f->a, env, next(pos), rho);
    case FKind::Or:
      return eval(f->a, env, pos, rho) || eval(f->b, env, pos, rho);
    case FKind::And:
      return eval(f->a, env, pos, rho) && eval(f->b, env, pos, rho);
    case FKind::Exists:
    case FKind::Forall: {
      bool ex = f->kind == FKind::Exists;
      for (const auto &d : dom_) {
        DataEnv e = env;
        e[f->name] = d;
        if (eval(f->a, e, pos, rho) == ex)
          return ex;
      }
      return !ex;
    }
    case FKind::GForall: {
      // exists x.(x != F & g) & forall x.((x != F & g) | body)
      auto guard = [&](const DataEnv &e) {
        for (const auto &y : f->frees)
          if (y != f->name && e.at(y) == e.at(f->name))
            return false;
        return eval(f->a, e, pos, rho);
      };
      bool some = false;
      for (const auto &d : dom_) {
        DataEnv e = env;
        e[f->name] = d;
        bool g = guard(e);
        some = some || g;
        if (!g && !eval(f->b, e, pos, rho))
          return false;
      }
      return some;
    }
    case FKind::Min:
    case FKind::Max: {
      std::set<std::string> fvs = free_data_vars(f);
      std::vector<std::string> fv(fvs.begin(), fvs.end());
      std::vector<DataEnv> envs;
      DataEnv cur;
      assignments(fv, 0, cur, envs);
      std::set<Point> all;
      for (const auto &e : envs)
        for (std::size_t p = 0; p < t_.size(); ++p)
          all.insert({e, p});
      Fix fix{fv, f->kind == FKind::Max ? all : std::set<Point>{}};
      auto saved = rho.find(f->name) != rho.end() ? std::optional<Fix>(rho[f->name]) : std::nullopt;
      for (;;) {
        rho[f->name] = fix;
        std::set<Point> nxt;
        for (const auto &pt : all)
          if (eval(f->a, pt.first, pt.second, rho))
            nxt.insert(pt);
        if (nxt == fix.sat)
          break;
        fix.sat = nxt;
      }
      if (saved)
        rho[f->name] = *saved;
      else
        rho.erase(f->name);
      return fix.sat.count({restrict(env, fv), pos}) > 0;
    }
    case FKind::RecVar: {
      const Fix &fix = rho.at(f->name);
      return fix.sat.count({restrict(env, fix.fv), pos}) > 0;
    }
    }
    return false;
  }
};

inline bool ref_eval(const FormulaPtr &f, const Lasso &t, const DataEnv &env0 = {}) {
  RefEval r(t, env0, quantifier_depth(f) + 1);
  return r.holds(f, env0);
}

// All words of length n up to renaming, as restricted growth strings over
// tokens prefix0, prefix1, ...
inline std::vector<Trace> all_types(std::size_t n, const std::string &prefix = "v") {
  std::vector<Trace> out;
  std::vector<int> cur(n);
  std::function<void(std::size_t, int)> go = [&](std::size_t i, int used) {
    if (i == n) {
      Trace w;
      for (int c : cur)
        w.push_back(prefix + std::to_string(c));
      out.push_back(w);
      return;
    }
    for (int c = 0; c <= used; ++c) {
      cur[i] = c;
      go(i + 1, std::max(used, c + 1));
    }
  };
  go(0, 0);
  return out;
}

inline std::vector<DataValue> distinct_values(const Trace &w) {
  std::vector<DataValue> out;
  for (const auto &v : w)
    if (std::find(out.begin(), out.end(), v) == out.end())
      out.push_back(v);
  return out;
}

// Random injective renaming of the values of w onto fresh tokens.
inline Renaming random_renaming(std::mt19937_64 &rng, const std::vector<DataValue> &values) {
  std::vector<int> ids(values.size() + 5);
  for (std::size_t i = 0; i < ids.size(); ++i)
    ids[i] = static_cast<int>(i);
  std::shuffle(ids.begin(), ids.end(), rng);
  Renaming r;
  for (std::size_t i = 0; i < values.size(); ++i)
    r[values[i]] = "r" + std::to_string(ids[i]);
  return r;
}

// Loop of length 1..3 over the values of w and fresh values.
inline Trace random_loop(std::mt19937_64 &rng, const Trace &w) {
  std::vector<DataValue> pool = distinct_values(w);
  pool.push_back("new0");
  pool.push_back("new1");
  std::size_t len = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  Trace loop;
  for (std::size_t i = 0; i < len; ++i)
    loop.push_back(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
  return loop;
}

inline Trace random_word(std::mt19937_64 &rng, std::size_t max_len, std::size_t values) {
  std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  Trace w;
  for (std::size_t i = 0; i < len; ++i)
    w.push_back("v" + std::to_string(std::uniform_int_distribution<std::size_t>(0, values - 1)(rng)));
  return w;
}

} // namespace testsupport
