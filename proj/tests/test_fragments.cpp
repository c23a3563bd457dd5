#include "datamon/cli.hpp"
#include "datamon/fragments.hpp"
#include "datamon/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace datamon;
using namespace testsupport;

TEST_SUITE_BEGIN("fragments");

namespace {

const char *kLeak = "exists x. <x=*> min X. (<x=*> tt | <x!=*> X)";
const char *kDist =
    "exists x. <*=x> min X. (<*=x> tt | exists y. <*!=x, y> (min Y. (<*=x> tt | <*!=y> Y) & X))";
const char *kForallSharp =
    "gforall x guard { min X.(<*!=dollar & *!=x> X | <*=dollar & *!=x> min Y.(<*=sharp & *!=x> tt | <*!=x> Y)) } "
    "frees { dollar, sharp } . ((min Z.(<*=x> tt | <*!=dollar> Z)) | <x=sharp> tt | <x=dollar> tt)";

FormulaPtr nf(const std::string &s) { return normalize(parse_formula(s), false).formula; }

bool has_box(const FormulaPtr &f) {
  return f && (f->kind == FKind::Box || has_box(f->a) || has_box(f->b));
}

} // namespace

TEST_CASE("classify: leak is disjunctive") {
  FragmentReport r = classify(nf(kLeak));
  CHECK(r.in(Fragment::disjHMLd));
  CHECK(r.in(Fragment::cHMLd));
  CHECK(r.in(Fragment::minHMLd));
  CHECK_FALSE(r.in(Fragment::sHMLd));
  CHECK_FALSE(r.in(Fragment::HMLd));
}

TEST_CASE("classify: pairwise distinct is conjunctive") {
  FragmentReport r = classify(nf(kDist));
  CHECK(r.in(Fragment::cHMLd));
  CHECK_FALSE(r.in(Fragment::disjHMLd));
  CHECK(r.witness.count(Fragment::disjHMLd));
}

TEST_CASE("classify: tt") {
  FragmentReport r = classify(f_tt());
  CHECK(r.in(Fragment::cHMLd));
  CHECK(r.in(Fragment::disjHMLd));
  CHECK(r.in(Fragment::HMLd));
  CHECK_FALSE(r.in(Fragment::sHMLd));
}

TEST_CASE("classify: inclusions hold on generated formulas") {
  for (Fragment fr : all_fragments())
    for (std::uint64_t s = 0; s < 60; ++s) {
      GenFormulaOptions g;
      g.seed = 40 + s;
      g.fragment = fr;
      g.depth = 1 + static_cast<int>(s % 4);
      FormulaPtr f;
      try {
        f = gen_formula(g);
      } catch (const DomainError &) {
        continue;
      }
      FragmentReport r = classify(f);
      INFO(fragment_name(fr), ": ", render_formula(f));
      CHECK(r.in(fr));
      if (r.in(Fragment::disjHMLd))
        CHECK(r.in(Fragment::cHMLd));
      if (r.in(Fragment::cHMLd))
        CHECK(r.in(Fragment::minHMLd));
      CHECK(r.in(Fragment::recHMLd));
      // alpha renaming does not change the report
      FormulaPtr g2 = normalize(parse_formula(render_formula(f))).formula;
      CHECK(classify(g2).member == r.member);
    }
}

TEST_CASE("fragment names") {
  for (Fragment f : all_fragments())
    CHECK(parse_fragment(fragment_name(f)) == f);
  CHECK(parse_fragment("chmld") == Fragment::cHMLd);
  CHECK_THROWS_AS(parse_fragment("nope"), DomainError);
}

TEST_CASE("check_guarded: the forall-sharp-exists-dollar formula") {
  FormulaPtr f = nf(kForallSharp);
  CHECK(check_guarded(f, {}, {"dollar", "sharp"}).ok);
}

TEST_CASE("check_guarded: bare universal is rejected") {
  GuardedCheck c = check_guarded(nf("forall x. min X. (<*=x> tt | <*!=x> X)"));
  CHECK_FALSE(c.ok);
  CHECK_FALSE(c.reason.empty());
}

TEST_CASE("check_guarded: tt for every V within F") {
  CHECK(check_guarded(f_tt()).ok);
  CHECK(check_guarded(f_tt(), {"x"}, {"x", "y"}).ok);
  CHECK(check_guarded(f_tt(), {}, {"x"}).ok);
}

TEST_CASE("desugar: the guarded universal and an empty F") {
  FormulaPtr f = parse_formula(kForallSharp);
  FormulaPtr d = desugar_gforall(f);
  REQUIRE(d->kind == FKind::And);
  REQUIRE(d->a->kind == FKind::Exists);
  REQUIRE(d->b->kind == FKind::Forall);
  // with F = {x} the disequality part vanishes
  FormulaPtr g = f_gforall("x", parse_formula("<*=x>tt"), {"x"}, parse_formula("<*!=x>tt"));
  FormulaPtr dg = desugar_gforall(g);
  CHECK(alpha_equal(dg->a, parse_formula("exists x. <*=x>tt")));
}

TEST_CASE("desugar: sugar and expansion agree on lassos") {
  FormulaPtr f = parse_formula(kForallSharp);
  FormulaPtr d = normalize(desugar_all(f), false).formula;
  DataEnv env{{"dollar", "$"}, {"sharp", "#"}};
  std::mt19937_64 rng(12);
  Trace alpha{"a", "b", "c", "$", "#"};
  for (int i = 0; i < 40; ++i) {
    Trace w;
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
    for (std::size_t k = 0; k < n; ++k)
      w.push_back(alpha[std::uniform_int_distribution<std::size_t>(0, 4)(rng)]);
    Lasso t{w, random_loop(rng, w)};
    INFO(render_lasso(t));
    bool a = lasso_eval(f, t, env);
    CHECK(lasso_eval(d, t, env) == a);
    // the reference evaluator is slow on this formula
    if (i < 4)
      CHECK(ref_eval(f, t, env) == a);
  }
}

TEST_CASE("gd: base clause and universal") {
  CHECK(gd(f_tt())->kind == FKind::Tt);
  CHECK(gd(f_ff())->kind == FKind::Ff);
  FormulaPtr phi = nf("forall x. min X. (<*=x> tt | <true> X)");
  FormulaPtr g = gd(phi);
  REQUIRE(g->kind == FKind::GForall);
  FormulaPtr body = phi->a;
  FormulaPtr expect = gd(body, {g->name}, {g->name});
  // the guard is the guarded copy of the body for V = F = {x}
  CHECK(alpha_equal(g->a, expect));
  CHECK(check_guarded(g).ok);
}

TEST_CASE("gd: output is guarded and implies the input") {
  std::mt19937_64 rng(31);
  int done = 0;
  for (std::uint64_t s = 0; done < 200; ++s) {
    GenFormulaOptions o;
    o.seed = 5000 + s;
    o.fragment = Fragment::minHMLd;
    o.depth = 1 + static_cast<int>(s % 3);
    FormulaPtr f = gen_formula(o);
    if (has_box(f)) {
      CHECK_THROWS_AS(gd(f), DomainError);
      continue;
    }
    ++done;
    FormulaPtr g = gd(f);
    INFO(render_formula(f));
    CHECK(check_guarded(g).ok);
    Trace w = random_word(rng, 4, 3);
    Lasso t{w, random_loop(rng, w)};
    if (lasso_eval(g, t))
      CHECK(lasso_eval(f, t));
  }
}

TEST_CASE("gd rejects max") { CHECK_THROWS_AS(gd(nf("max X. [true] X")), DomainError); }

TEST_SUITE_END();
