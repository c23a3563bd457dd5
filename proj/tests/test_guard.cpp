#include "datamon/cli.hpp"
#include "datamon/guard.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace datamon;
using namespace testsupport;

TEST_SUITE_BEGIN("guard");

namespace {

const char *kForallSharp =
    "gforall x guard { min X.(<*!=dollar & *!=x> X | <*=dollar & *!=x> min Y.(<*=sharp & *!=x> tt | <*!=x> Y)) } "
    "frees { dollar, sharp } . ((min Z.(<*=x> tt | <*!=dollar> Z)) | <x=sharp> tt | <x=dollar> tt)";

const DataEnv kEnv{{"dollar", "$"}, {"sharp", "#"}};

// forall over the block between $ and #, written with a bare universal
const char *kForallPlain = "forall x. ((min Z.(<*=x> tt | <*!=dollar> Z)) | "
                           "max W. ([*=dollar] max V. ([*=x] ff & [*!=sharp] V) & [*!=dollar] W))";

std::optional<std::size_t> good_index(GuardedSession s, const Trace &w) {
  for (const auto &d : w)
    s.feed(d);
  return s.good_at();
}

Trace split(const std::string &s) {
  Trace w;
  for (char c : s)
    if (c != ' ')
      w.push_back(std::string(1, c));
  return w;
}

} // namespace

TEST_CASE("session: good at the closing mark") {
  GuardedSession s(parse_formula(kForallSharp), kEnv);
  Trace w = split("ab$a#");
  for (std::size_t i = 0; i < w.size(); ++i) {
    GuardStatus st = s.feed(w[i]);
    CHECK((st == GuardStatus::Good) == (i + 1 == w.size()));
  }
  REQUIRE(s.good_at());
  CHECK(*s.good_at() == 5);
  s.feed("q");
  CHECK(s.status() == GuardStatus::Good);
  CHECK(*s.good_at() == 5);
}

TEST_CASE("session: fresh value in the second block never becomes good") {
  GuardedSession s(parse_formula(kForallSharp), kEnv);
  for (const auto &d : split("ab$c#aab#"))
    CHECK(s.feed(d) != GuardStatus::Good);
}

TEST_CASE("session: no dollar stays pending") {
  GuardedSession s(parse_formula(kForallSharp), kEnv);
  for (const auto &d : split("abcabcab"))
    CHECK(s.feed(d) == GuardStatus::Pending);
}

TEST_CASE("session: tiny budget stalls") {
  GuardedSession s(parse_formula(kForallSharp), kEnv, 2);
  for (const auto &d : split("ab$a#"))
    s.feed(d);
  CHECK(s.status() == GuardStatus::Stalled);
  CHECK(s.stalls() > 0);
  CHECK(guard_status_name(GuardStatus::Stalled) == "stalled");
}

TEST_CASE("session: renaming keeps the verdict index") {
  std::mt19937_64 rng(51);
  Trace letters{"a", "b", "c", "$", "#"};
  for (int i = 0; i < 100; ++i) {
    Trace w;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    for (std::size_t k = 0; k < n; ++k)
      w.push_back(letters[std::uniform_int_distribution<std::size_t>(0, 4)(rng)]);
    std::vector<DataValue> vals = distinct_values(w);
    for (const auto &[k, v] : kEnv)
      if (std::find(vals.begin(), vals.end(), v) == vals.end())
        vals.push_back(v);
    Renaming r = random_renaming(rng, vals);
    DataEnv env;
    for (const auto &[k, v] : kEnv)
      env[k] = r.at(v);
    auto a = good_index(GuardedSession(parse_formula(kForallSharp), kEnv), w);
    auto b = good_index(GuardedSession(parse_formula(kForallSharp), env), apply_renaming(r, w));
    INFO(render_trace(w));
    CHECK(a == b);
  }
}

TEST_CASE("session: agrees with the synthesized monitor on cHMLd") {
  std::mt19937_64 rng(53);
  for (std::uint64_t s = 0; s < 100; ++s) {
    GenFormulaOptions g;
    g.seed = 7700 + s;
    g.fragment = Fragment::cHMLd;
    g.depth = 1 + static_cast<int>(s % 3);
    FormulaPtr f = gen_formula(g);
    Trace w = random_word(rng, 6, 3);
    Verdict v = run(synthesize(f), w);
    GuardedSession ses = guard_pipeline(f);
    for (const auto &d : w)
      ses.feed(d);
    INFO(render_formula(f), " on ", render_trace(w));
    CHECK(ses.status() != GuardStatus::Stalled);
    // on infinite traces the session may flag a prefix the monitor still waits on
    if (v.accepted && (v.index > 0 || !w.empty())) {
      REQUIRE(ses.good_at());
      CHECK(*ses.good_at() <= std::max<std::size_t>(v.index, 1));
    }
  }
}

TEST_CASE("pipeline: the plain universal formula") {
  FormulaPtr f = parse_formula(kForallPlain);
  CHECK_THROWS_AS(guard_pipeline(f, kEnv), DomainError);
  FormulaPtr m = parse_formula("forall x. ((min Z.(<*=x> tt | <*!=dollar> Z)) | <x=sharp> tt | <x=dollar> tt)");
  GuardedSession s = guard_pipeline(m, kEnv);
  CHECK(check_guarded(normalize(s.formula(), false).formula, {}, {"dollar", "sharp"}).ok);
}

TEST_CASE("pipeline: good prefixes are sound") {
  FormulaPtr f = parse_formula(kForallSharp);
  std::mt19937_64 rng(57);
  Trace letters{"a", "b", "$", "#"};
  int good = 0;
  for (int i = 0; i < 200; ++i) {
    Trace w;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
    for (std::size_t k = 0; k < n; ++k)
      w.push_back(letters[std::uniform_int_distribution<std::size_t>(0, 3)(rng)]);
    auto at = good_index(GuardedSession(f, kEnv), w);
    if (!at)
      continue;
    ++good;
    Trace pre(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(*at));
    for (int j = 0; j < 50; ++j) {
      Lasso t{pre, random_loop(rng, pre)};
      INFO(render_lasso(t));
      CHECK(lasso_eval(f, t, kEnv));
    }
  }
  CHECK(good > 0);
}

TEST_SUITE_END();
