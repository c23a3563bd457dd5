#include "datamon/cli.hpp"
#include "datamon/oracle.hpp"
#include "support.hpp"

#include <doctest.h>
#include <sstream>

using namespace datamon;
using namespace testsupport;

TEST_SUITE_BEGIN("oracle");

namespace {

const char *kLeak = "exists x. <x=*> min X. (<x=*> tt | <x!=*> X)";
const char *kDist =
    "exists x. <*=x> min X. (<*=x> tt | exists y. <*!=x, y> (min Y. (<*=x> tt | <*!=y> Y) & X))";
const char *kForallSharp =
    "gforall x guard { min X.(<*!=dollar & *!=x> X | <*=dollar & *!=x> min Y.(<*=sharp & *!=x> tt | <*!=x> Y)) } "
    "frees { dollar, sharp } . ((min Z.(<*=x> tt | <*!=dollar> Z)) | <x=sharp> tt | <x=dollar> tt)";

FormulaPtr nf(const std::string &s) { return normalize(parse_formula(s)).formula; }

const DataEnv kEnv{{"dollar", "$"}, {"sharp", "#"}};

Trace words(const std::string &s) {
  std::istringstream in(s);
  Trace w;
  for (std::string tok; in >> tok;)
    w.push_back(tok);
  return w;
}

Annotation leak_annotation() {
  Annotation a;
  DataEnv x0{{"x", "0"}};
  a.nodes = {{"", {}, 0},          {"0", x0, 0},         {"0.0", x0, 1},   {"0.0.0", x0, 1},
             {"0.0.0.1", x0, 1},   {"0.0.0.1.0", x0, 2}, {"0.0", x0, 2},   {"0.0.0", x0, 2},
             {"0.0.0.0", x0, 2},   {"0.0.0.0.0", x0, 3}};
  for (std::size_t i = 0; i + 1 < a.nodes.size(); ++i)
    a.edges.emplace_back(i, i + 1);
  return a;
}

} // namespace

TEST_CASE("lasso_eval: examples") {
  CHECK(lasso_eval(nf(kLeak), parse_lasso("0 2 0 ; 1")));
  CHECK_FALSE(lasso_eval(nf(kLeak), parse_lasso("0 ; 1")));
  CHECK(lasso_eval(f_tt(), parse_lasso("; a")));
  CHECK(lasso_eval(nf(kDist), parse_lasso("3 1 2 3 ; 9")));
  CHECK_FALSE(lasso_eval(nf(kDist), parse_lasso("3 1 2 ; 9")));
}

TEST_CASE("lasso_eval agrees with the reference evaluator") {
  std::mt19937_64 rng(2);
  for (std::uint64_t s = 0; s < 250; ++s) {
    GenFormulaOptions g;
    g.seed = 100 + s;
    g.fragment = Fragment::recHMLd;
    g.depth = 1 + static_cast<int>(s % 4);
    FormulaPtr f = gen_formula(g);
    Trace w = random_word(rng, 4, 3);
    Lasso t{w, random_loop(rng, w)};
    INFO(render_formula(f), " on ", render_lasso(t));
    CHECK(lasso_eval(f, t) == ref_eval(f, t));
  }
}

TEST_CASE("lasso_eval: renaming stability and extra fresh values") {
  std::mt19937_64 rng(4);
  for (std::uint64_t s = 0; s < 120; ++s) {
    GenFormulaOptions g;
    g.seed = 400 + s;
    g.fragment = Fragment::recHMLd;
    g.depth = 1 + static_cast<int>(s % 4);
    FormulaPtr f = gen_formula(g);
    Trace w = random_word(rng, 4, 3);
    Lasso t{w, random_loop(rng, w)};
    bool v = lasso_eval(f, t);
    Lasso r = apply_renaming(random_renaming(rng, t.values()), t);
    INFO(render_formula(f), " on ", render_lasso(t));
    CHECK(lasso_eval(f, r) == v);
    OracleOptions more;
    more.extra_fresh = 2;
    CHECK(lasso_eval(f, t, {}, more) == v);
  }
}

TEST_CASE("check_annotation: leak witness") {
  FormulaPtr f = nf(kLeak);
  Lasso t = parse_lasso("0 2 0 ; 1");
  Annotation a = leak_annotation();
  CHECK(check_annotation(f, {}, t, a).ok);
  Annotation cut = a;
  cut.nodes.pop_back();
  cut.edges.pop_back();
  CHECK_FALSE(check_annotation(f, {}, t, cut).ok);
  Annotation bad;
  bad.nodes = {{"", {}, 0}};
  CHECK_FALSE(check_annotation(f_ff(), {}, t, bad).ok);
}

TEST_CASE("annotation json round trip") {
  Annotation a = leak_annotation();
  Annotation b = annotation_from_json(annotation_to_json(a, nf(kLeak)));
  CHECK(b.nodes == a.nodes);
  CHECK(b.edges == a.edges);
}

TEST_CASE("find_finite_annotation: examples") {
  Lasso t = parse_lasso("0 2 0 ; 1");
  auto a = find_finite_annotation(nf(kLeak), {}, t);
  REQUIRE(a);
  CHECK(check_annotation(nf(kLeak), {}, t, *a).ok);
  CHECK_FALSE(find_finite_annotation(f_ff(), {}, t));
  Lasso d = parse_lasso("3 1 2 3 ; 9");
  auto b = find_finite_annotation(nf(kDist), {}, d);
  REQUIRE(b);
  CHECK(check_annotation(nf(kDist), {}, d, *b).ok);
}

TEST_CASE("find_finite_annotation succeeds exactly when the formula holds") {
  std::mt19937_64 rng(6);
  for (std::uint64_t s = 0; s < 300; ++s) {
    GenFormulaOptions g;
    g.seed = 2000 + s;
    g.fragment = Fragment::cHMLd;
    g.depth = 1 + static_cast<int>(s % 4);
    FormulaPtr f = gen_formula(g);
    Trace w = random_word(rng, 4, 3);
    Lasso t{w, random_loop(rng, w)};
    auto a = find_finite_annotation(f, {}, t);
    INFO(render_formula(f), " on ", render_lasso(t));
    CHECK(a.has_value() == lasso_eval(f, t));
    if (a)
      CHECK(check_annotation(f, {}, t, *a).ok);
  }
}

TEST_CASE("guarded annotation: witness conditions") {
  FormulaPtr f = parse_formula(kForallSharp);
  Lasso t = parse_lasso("a b $ a # ; z");
  auto a = find_guarded_annotation(f, kEnv, t);
  REQUIRE(a);
  CHECK(check_guarded_annotation(f, kEnv, t, *a).ok);
  REQUIRE(a->witnesses.size() == 1);
  auto &[id, w] = *a->witnesses.begin();

  Annotation star_in = *a;
  star_in.witnesses[id].D.push_back(w.d_star);
  CHECK_FALSE(check_guarded_annotation(f, kEnv, t, star_in).ok);

  Annotation missing = *a;
  auto &D = missing.witnesses[id].D;
  D.erase(std::remove(D.begin(), D.end(), DataValue("a")), D.end());
  CHECK_FALSE(check_guarded_annotation(f, kEnv, t, missing).ok);

  CHECK_FALSE(find_guarded_annotation(f, kEnv, parse_lasso("a b $ c # ; z")));
}

TEST_CASE("good_prefix_guarded: examples") {
  FormulaPtr f = parse_formula(kForallSharp);
  CHECK(good_prefix_guarded(f, words("a b $ a #"), kEnv).verdict == PrefixVerdict::Good);
  CHECK(good_prefix_guarded(f, words("a b $ c"), kEnv).verdict == PrefixVerdict::Unknown);
  CHECK(good_prefix_guarded(f, words("a b $ a"), kEnv).verdict == PrefixVerdict::Unknown);
  CHECK(good_prefix_guarded(f, words("a b $ c #"), kEnv).verdict == PrefixVerdict::Unknown);
  FormulaPtr one = parse_formula("<true>tt");
  CHECK(good_prefix_guarded(one, {}).verdict == PrefixVerdict::Unknown);
  CHECK(good_prefix_guarded(one, {"a"}).verdict == PrefixVerdict::Good);
}

TEST_CASE("good_prefix_guarded: budget exhaustion is Unknown") {
  FormulaPtr f = parse_formula(kForallSharp);
  GoodPrefixResult r = good_prefix_guarded(f, words("a b $ a #"), kEnv, 3);
  CHECK(r.verdict == PrefixVerdict::Unknown);
  CHECK(r.budget_exhausted);
}

TEST_CASE("good_prefix_guarded is sound on sampled loops") {
  FormulaPtr f = parse_formula(kForallSharp);
  std::mt19937_64 rng(14);
  Trace alpha{"a", "b", "c", "$", "#"};
  int good = 0;
  for (int i = 0; i < 300; ++i) {
    Trace w;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    for (std::size_t k = 0; k < n; ++k)
      w.push_back(alpha[std::uniform_int_distribution<std::size_t>(0, 4)(rng)]);
    if (good_prefix_guarded(f, w, kEnv).verdict != PrefixVerdict::Good)
      continue;
    ++good;
    for (int j = 0; j < 50; ++j) {
      Lasso t{w, random_loop(rng, w)};
      INFO(render_lasso(t));
      CHECK(lasso_eval(f, t, kEnv));
    }
  }
  CHECK(good > 0);
}

TEST_SUITE_END();
