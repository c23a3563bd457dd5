#include "datamon/cli.hpp"
#include "datamon/monitor.hpp"
#include "datamon/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace datamon;
using namespace testsupport;

TEST_SUITE_BEGIN("monitor");

namespace {

const char *kLeak = "exists x. <x=*> min X. (<x=*> tt | <x!=*> X)";
const char *kDist =
    "exists x. <*=x> min X. (<*=x> tt | exists y. <*!=x, y> (min Y. (<*=x> tt | <*!=y> Y) & X))";

FormulaPtr nf(const std::string &s) { return normalize(parse_formula(s)).formula; }

// Concrete acceptance: guesses range over the values of w and a few fresh
// values; yes is reached within the rest of w.
class Concrete {
public:
  Concrete(const Trace &w, std::size_t fresh) : w_(w) {
    dom_ = distinct_values(w);
    for (std::size_t i = 0; i < fresh; ++i)
      dom_.push_back("fresh_" + std::to_string(i));
  }

  // length of the shortest accepted prefix
  std::optional<std::size_t> first(const MonitorPtr &m) {
    for (std::size_t n = 0; n <= w_.size(); ++n) {
      limit_ = n;
      if (acc(m, {}, {}, 0))
        return n;
    }
    return std::nullopt;
  }

private:
  using Recs = std::map<std::string, MonitorPtr>;
  Trace w_;
  std::vector<DataValue> dom_;
  std::size_t limit_ = 0;

  bool acc(const MonitorPtr &m, const DataEnv &env, const Recs &recs, std::size_t i) {
    switch (m->kind) {
    case MKind::Yes:
      return true;
    case MKind::End:
      return false;
    case MKind::Guard:
      return i < limit_ && eval_bexpr(m->guard, env, w_[i]) && acc(m->a, env, recs, i + 1);
    case MKind::Guess:
      for (const auto &d : dom_) {
        DataEnv e = env;
        e[m->name] = d;
        if (acc(m->a, e, recs, i))
          return true;
      }
      return false;
    case MKind::Or:
      return acc(m->a, env, recs, i) || acc(m->b, env, recs, i);
    case MKind::And:
      return acc(m->a, env, recs, i) && acc(m->b, env, recs, i);
    case MKind::Rec: {
      Recs r = recs;
      r[m->name] = m;
      return acc(m->a, env, r, i);
    }
    case MKind::Var: {
      const MonitorPtr &def = recs.at(m->name);
      return acc(def, env, recs, i);
    }
    }
    return false;
  }
};

} // namespace

TEST_CASE("synthesize: leak monitor") {
  MonitorPtr m = synthesize(nf(kLeak));
  CHECK(monitor_equal(m, parse_monitor("guess x. (x=*).(rec X. (x=*).yes + (x!=*).X)")));
  CHECK(synthesize(f_tt())->kind == MKind::Yes);
  CHECK(synthesize(f_ff())->kind == MKind::End);
}

TEST_CASE("synthesize: pairwise distinct monitor shape") {
  MonitorPtr m = synthesize(nf(kDist));
  std::size_t ands = 0, guesses = 0, recs = 0;
  std::function<void(const MonitorPtr &)> walk = [&](const MonitorPtr &x) {
    if (!x)
      return;
    ands += x->kind == MKind::And;
    guesses += x->kind == MKind::Guess;
    recs += x->kind == MKind::Rec;
    walk(x->a);
    walk(x->b);
  };
  walk(m);
  CHECK(ands == 1);
  CHECK(guesses == 2);
  CHECK(recs == 2);
  CHECK_THROWS_AS(synthesize(nf("[true]ff")), DomainError);
}

TEST_CASE("monitor syntax round trip") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    MonitorPtr m = gen_monitor(s, 3, 2);
    CHECK(monitor_guarded(m));
    CHECK(monitor_equal(parse_monitor(render_monitor(m)), m));
  }
  CHECK_FALSE(monitor_guarded(parse_monitor("rec X. X + (true).yes")));
}

TEST_CASE("engine: tau closure") {
  auto engine = [](const std::string &s) { return Engine(std::make_shared<const Program>(compile_monitor(parse_monitor(s)))); };
  Engine a = engine("yes + (*=*).end");
  CHECK(Engine::has_yes(a.initial()));
  Engine b = engine("rec X. (*=*).X + (*=*).yes");
  auto cs = b.initial();
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].root.kind == CTree::Kind::Or);
  // a loop that cannot reach yes is dropped at once
  CHECK(engine("rec X. (true).X").initial().empty());
  Engine c = engine("(true).yes + (true).yes");
  CHECK(c.initial().size() == 1);
  CHECK_THROWS_AS(engine("rec X. X").initial(), DomainError);
}

TEST_CASE("engine: leak run splits on the guessed value") {
  MonitorPtr m = synthesize(nf(kLeak));
  Engine e(std::make_shared<const Program>(compile_monitor(m)));
  auto cs = e.step(e.initial(), "1");
  REQUIRE(cs.size() == 1);
  cs = e.step(cs, "0");
  CHECK_FALSE(Engine::has_yes(cs));
  cs = e.step(cs, "1");
  CHECK(Engine::has_yes(cs));
  auto after = e.step(cs, "5");
  CHECK(Engine::has_yes(after));
}

TEST_CASE("run: examples") {
  MonitorPtr m = synthesize(nf(kLeak));
  Verdict a = run(m, {"1", "0", "1"});
  CHECK(a.accepted);
  CHECK(a.index == 3);
  CHECK_FALSE(run(m, {"1", "0", "2"}).accepted);
  Verdict y = run(m_yes(), {});
  CHECK(y.accepted);
  CHECK(y.index == 0);
}

TEST_CASE("run_violation: examples") {
  FormulaPtr d = dualize(nf(kLeak));
  Verdict r = run_violation(d, {"1", "0", "1"});
  CHECK(r.accepted);
  CHECK(r.index == 3);
  CHECK_FALSE(run_violation(d, {"1", "0", "2"}).accepted);
  Verdict f = run_violation(f_ff(), {"a"});
  CHECK(f.accepted);
  CHECK(f.index == 0);
}

TEST_CASE("hmld monitor: first two equal") {
  HmldMonitor h(nf("exists x. <*=x><*=x> tt"));
  CHECK(h.horizon() == 2);
  CHECK(h.classify({"5", "5"}) == TwoVerdict::Good);
  CHECK(h.classify({"5", "6"}) == TwoVerdict::Bad);
  CHECK(h.classify({"5"}) == TwoVerdict::Undecided);
}

TEST_CASE("hmld monitor: verdicts by the modal height") {
  std::mt19937_64 rng(19);
  for (std::uint64_t s = 0; s < 200; ++s) {
    GenFormulaOptions g;
    g.seed = 3000 + s;
    g.fragment = Fragment::HMLd;
    g.depth = 1 + static_cast<int>(s % 4);
    FormulaPtr f = gen_formula(g);
    HmldMonitor h(f);
    CHECK(h.horizon() <= modal_height(f));
    Trace w = random_word(rng, 0, 3);
    for (std::size_t i = 0; i < h.horizon(); ++i)
      w.push_back("v" + std::to_string(std::uniform_int_distribution<int>(0, 2)(rng)));
    CHECK(h.classify(w) != TwoVerdict::Undecided);
  }
}

TEST_CASE("symbolic guessing agrees with concrete enumeration") {
  std::mt19937_64 rng(23);
  for (std::uint64_t s = 0; s < 150; ++s) {
    MonitorPtr m = gen_monitor(500 + s, 3, 2);
    for (int j = 0; j < 20; ++j) {
      Trace w = random_word(rng, 5, 3);
      Concrete c(w, 3);
      auto expect = c.first(m);
      Verdict v = run(m, w);
      INFO(render_monitor(m), " on ", render_trace(w));
      CHECK(v.accepted == expect.has_value());
      if (expect && v.accepted)
        CHECK(v.index == *expect);
    }
  }
}

TEST_CASE("verdicts are irrevocable and renaming invariant") {
  std::mt19937_64 rng(29);
  for (std::uint64_t s = 0; s < 100; ++s) {
    GenFormulaOptions g;
    g.seed = 6000 + s;
    g.depth = 1 + static_cast<int>(s % 4);
    MonitorPtr m = synthesize(gen_formula(g));
    Trace w = random_word(rng, 6, 3);
    MonitorSession ses(m);
    bool seen = ses.accepted();
    for (const auto &d : w) {
      bool now = ses.push(d);
      CHECK((!seen || now));
      seen = now;
    }
    Verdict v = run(m, w);
    Verdict r = run(m, apply_renaming(random_renaming(rng, distinct_values(w)), w));
    CHECK(v.accepted == r.accepted);
    CHECK(v.index == r.index);
  }
}

TEST_SUITE_END();
