#include "datamon/cli.hpp"

#include <algorithm>
#include <random>

namespace datamon {

namespace {

class FormulaGen {
public:
  FormulaGen(const GenFormulaOptions &opt) : opt_(opt), rng_(opt.seed) {}

  FormulaPtr run() { return go(opt_.depth); }

private:
  struct RVar {
    std::string name;
    bool guarded;
  };

  GenFormulaOptions opt_;
  std::mt19937_64 rng_;
  std::vector<std::string> scope_;
  std::vector<RVar> rvars_;
  int next_rvar_ = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool ok(FKind k) const { return allowed(opt_.fragment, k); }

  static bool allowed(Fragment fr, FKind k) {
    static const std::map<Fragment, std::vector<FKind>> table = {
        {Fragment::HMLd,
         {FKind::Tt, FKind::Ff, FKind::Diamond, FKind::Box, FKind::Exists, FKind::Forall, FKind::Or, FKind::And}},
        {Fragment::cHMLd, {FKind::Tt, FKind::Diamond, FKind::Exists, FKind::Or, FKind::And, FKind::Min}},
        {Fragment::sHMLd, {FKind::Ff, FKind::Box, FKind::Forall, FKind::Or, FKind::And, FKind::Max}},
        {Fragment::disjHMLd, {FKind::Tt, FKind::Diamond, FKind::Exists, FKind::Or, FKind::Min}},
        {Fragment::conjHMLd, {FKind::Ff, FKind::Box, FKind::Forall, FKind::And, FKind::Max}},
        {Fragment::minHMLd,
         {FKind::Tt, FKind::Ff, FKind::Diamond, FKind::Box, FKind::Exists, FKind::Forall, FKind::Or, FKind::And,
          FKind::Min}},
        {Fragment::recHMLd,
         {FKind::Tt, FKind::Ff, FKind::Diamond, FKind::Box, FKind::Exists, FKind::Forall, FKind::Or, FKind::And,
          FKind::Min, FKind::Max}},
    };
    const auto &v = table.at(fr);
    return std::find(v.begin(), v.end(), k) != v.end();
  }

  Term term() {
    if (scope_.empty() || pick(2) == 0)
      return Term::Star();
    return Term::Var(scope_[pick(static_cast<int>(scope_.size()))]);
  }

  BExprPtr guard() {
    if (scope_.empty() || pick(4) == 0)
      return b_true();
    auto atom = [&]() {
      Term l = Term::Star();
      Term r = Term::Var(scope_[pick(static_cast<int>(scope_.size()))]);
      if (pick(4) == 0)
        l = term();
      if (pick(2) == 0)
        std::swap(l, r);
      return pick(2) == 0 ? b_eq(l, r) : b_neq(l, r);
    };
    BExprPtr g = atom();
    if (pick(3) == 0)
      g = b_and(g, atom());
    return g;
  }

  FormulaPtr leaf() {
    std::vector<FormulaPtr> opts;
    if (ok(FKind::Tt))
      opts.push_back(f_tt());
    if (ok(FKind::Ff))
      opts.push_back(f_ff());
    for (const auto &r : rvars_)
      if (r.guarded) {
        opts.push_back(f_var(r.name));
        opts.push_back(f_var(r.name));
      }
    return opts[pick(static_cast<int>(opts.size()))];
  }

  FormulaPtr go(int depth) {
    if (depth <= 0 || pick(6) == 0)
      return leaf();
    std::vector<FKind> kinds;
    for (FKind k : {FKind::Diamond, FKind::Box, FKind::Exists, FKind::Forall, FKind::Or, FKind::And, FKind::Min,
                    FKind::Max})
      if (ok(k)) {
        kinds.push_back(k);
        if (k == FKind::Diamond || k == FKind::Box)
          kinds.push_back(k);
      }
    FKind k = kinds[pick(static_cast<int>(kinds.size()))];
    switch (k) {
    case FKind::Diamond:
    case FKind::Box: {
      BExprPtr g = guard();
      std::vector<bool> saved;
      for (auto &r : rvars_) {
        saved.push_back(r.guarded);
        r.guarded = true;
      }
      FormulaPtr body = go(depth - 1);
      for (std::size_t i = 0; i < rvars_.size(); ++i)
        rvars_[i].guarded = saved[i];
      return k == FKind::Diamond ? f_diamond(g, body) : f_box(g, body);
    }
    case FKind::Exists:
    case FKind::Forall: {
      std::string x = "x" + std::to_string(pick(std::max(1, opt_.vars)));
      scope_.push_back(x);
      FormulaPtr body = go(depth - 1);
      scope_.pop_back();
      return k == FKind::Exists ? f_exists(x, body) : f_forall(x, body);
    }
    case FKind::Or:
    case FKind::And: {
      FormulaPtr l = go(depth - 1);
      FormulaPtr r = go(depth - 1);
      return k == FKind::Or ? f_or(l, r) : f_and(l, r);
    }
    default: {
      std::string X = "X" + std::to_string(next_rvar_++);
      rvars_.push_back({X, false});
      FormulaPtr body = go(depth);
      rvars_.pop_back();
      return k == FKind::Min ? f_min(X, body) : f_max(X, body);
    }
    }
  }
};

} // namespace

FormulaPtr gen_formula(const GenFormulaOptions &opt) {
  if (opt.depth < 0)
    throw DomainError("gen formula: negative depth");
  if (opt.vars < 0)
    throw DomainError("gen formula: negative variable count");
  FormulaGen g(opt);
  return normalize(g.run(), true).formula;
}

Trace gen_trace(std::uint64_t seed, std::size_t length, std::size_t alphabet) {
  if (alphabet == 0)
    throw DomainError("gen trace: alphabet must be nonempty");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> d(0, alphabet - 1);
  Trace t;
  for (std::size_t i = 0; i < length; ++i)
    t.push_back("v" + std::to_string(d(rng)));
  return t;
}

Lasso gen_lasso(std::uint64_t seed, std::size_t length, std::size_t alphabet) {
  if (length == 0)
    throw DomainError("gen trace: a lasso needs a nonempty loop");
  Trace all = gen_trace(seed, length, alphabet);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::size_t cut = std::uniform_int_distribution<std::size_t>(0, length - 1)(rng);
  return Lasso{Trace(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut)),
               Trace(all.begin() + static_cast<std::ptrdiff_t>(cut), all.end())};
}

namespace {

class MonitorGen {
public:
  MonitorGen(std::uint64_t seed, int vars) : rng_(seed), vars_(vars) {}

  MonitorPtr go(int depth) {
    if (depth <= 0 || pick(6) == 0)
      return leaf();
    switch (pick(7)) {
    case 0:
    case 1: {
      BExprPtr g = guard();
      std::vector<bool> saved;
      for (auto &r : rvars_) {
        saved.push_back(r.second);
        r.second = true;
      }
      MonitorPtr m = go(depth - 1);
      for (std::size_t i = 0; i < rvars_.size(); ++i)
        rvars_[i].second = saved[i];
      return m_guard(g, m);
    }
    case 2: {
      std::string x = "x" + std::to_string(pick(std::max(1, vars_)));
      scope_.push_back(x);
      MonitorPtr m = go(depth - 1);
      scope_.pop_back();
      return m_guess(x, m);
    }
    case 3:
      return m_or(go(depth - 1), go(depth - 1));
    case 4:
      return m_and(go(depth - 1), go(depth - 1));
    default: {
      std::string X = "X" + std::to_string(next_++);
      rvars_.push_back({X, false});
      MonitorPtr m = go(depth);
      rvars_.pop_back();
      return m_rec(X, m);
    }
    }
  }

private:
  std::mt19937_64 rng_;
  int vars_;
  std::vector<std::string> scope_;
  std::vector<std::pair<std::string, bool>> rvars_;
  int next_ = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  BExprPtr guard() {
    if (scope_.empty() || pick(4) == 0)
      return b_true();
    auto atom = [&]() {
      Term r = Term::Var(scope_[pick(static_cast<int>(scope_.size()))]);
      return pick(2) == 0 ? b_eq(Term::Star(), r) : b_neq(Term::Star(), r);
    };
    BExprPtr g = atom();
    if (pick(3) == 0)
      g = b_and(g, atom());
    return g;
  }

  MonitorPtr leaf() {
    std::vector<MonitorPtr> opts{m_yes(), m_end()};
    for (const auto &r : rvars_)
      if (r.second) {
        opts.push_back(m_var(r.first));
        opts.push_back(m_var(r.first));
      }
    return opts[pick(static_cast<int>(opts.size()))];
  }
};

} // namespace

MonitorPtr gen_monitor(std::uint64_t seed, int depth, int vars) {
  MonitorGen g(seed, vars);
  return g.go(depth);
}

} // namespace datamon
