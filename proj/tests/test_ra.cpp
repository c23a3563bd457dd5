#include "datamon/cli.hpp"
#include "datamon/oracle.hpp"
#include "datamon/ra.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace datamon;
using namespace testsupport;

TEST_SUITE_BEGIN("ra");

namespace {

const char *kLeak = "exists x. <x=*> min X. (<x=*> tt | <x!=*> X)";

FormulaPtr nf(const std::string &s) { return normalize(parse_formula(s)).formula; }

RATransition guard_tr(int from, int to, const std::string &g) {
  RATransition t;
  t.from = from;
  t.to = to;
  t.kind = RATransition::Kind::Guard;
  t.guard = parse_bexpr(g);
  return t;
}

RATransition guess_tr(int from, int to, const std::string &r) {
  RATransition t;
  t.from = from;
  t.to = to;
  t.kind = RATransition::Kind::Guess;
  t.reg = r;
  return t;
}

// guess x, read x twice; location 4 is a sink after a mismatch
RegisterAutomaton first_second() {
  RegisterAutomaton a;
  a.registers = {"x"};
  a.locations.resize(5);
  a.locations[3].accepting = true;
  a.transitions = {guess_tr(0, 1, "x"), guard_tr(1, 2, "x=*"), guard_tr(2, 3, "x=*"), guard_tr(3, 3, "true"),
                   guard_tr(1, 4, "x!=*")};
  return a;
}

ValType type_of(bool sentinel) { return normalize_type({0}, {sentinel}); }

std::vector<Trace> words_up_to(std::size_t n) {
  std::vector<Trace> out;
  for (std::size_t k = 0; k <= n; ++k)
    for (const Trace &w : all_types(k))
      out.push_back(w);
  return out;
}

} // namespace

TEST_CASE("monitor_to_ra: yes and conjunction gadgets") {
  RegisterAutomaton y = monitor_to_ra(m_yes());
  REQUIRE(y.locations.size() == 1);
  CHECK(y.locations[0].accepting);
  REQUIRE(y.transitions.size() == 1);
  CHECK(y.transitions[0].to == 0);
  CHECK(bexpr_equal(y.transitions[0].guard, b_true()));

  RegisterAutomaton c = monitor_to_ra(parse_monitor("(*=*).yes & (*=*).yes"));
  bool gadget = false;
  for (int l = 0; l < static_cast<int>(c.locations.size()); ++l) {
    if (!c.locations[l].universal)
      continue;
    auto out = c.out(l);
    gadget = gadget || (out.size() == 2 && std::all_of(out.begin(), out.end(), [](const RATransition *t) {
                          return t->kind == RATransition::Kind::Eps;
                        }));
  }
  CHECK(gadget);
}

TEST_CASE("ra_member: leak automaton") {
  RegisterAutomaton a = monitor_to_ra(synthesize(nf(kLeak)));
  CHECK(a.registers.size() == 1);
  CHECK(ra_member_prefix(a, {"1", "0", "1"}));
  CHECK_FALSE(ra_member_prefix(a, {"1", "0", "2"}));
  CHECK(ra_member(a, {"1", "0", "1", "7"}));
  RegisterAutomaton y = monitor_to_ra(m_yes());
  CHECK(ra_member(y, {}));
}

TEST_CASE("ra json round trip") {
  RegisterAutomaton a = monitor_to_ra(synthesize(nf(kLeak)));
  RegisterAutomaton b = ra_from_json(ra_to_json(a));
  CHECK(ra_to_json(b) == ra_to_json(a));
}

TEST_CASE("unravel: two-location cycle") {
  RegisterAutomaton a;
  a.locations.resize(2);
  a.locations[1].accepting = true;
  a.transitions = {guard_tr(0, 1, "true"), guard_tr(1, 0, "true")};
  RegisterAutomaton u = unravel(a);
  CHECK(u.locations.size() <= 2);
  for (std::size_t n = 0; n < 5; ++n) {
    Trace w(n, "a");
    CHECK(ra_member(u, w) == ra_member(a, w));
  }
}

TEST_CASE("unravel preserves membership") {
  std::mt19937_64 rng(41);
  for (std::uint64_t s = 0; s < 40; ++s) {
    RegisterAutomaton a = monitor_to_ra(gen_monitor(s, 3, 2));
    RegisterAutomaton u = unravel(a);
    for (int j = 0; j < 40; ++j) {
      Trace w = random_word(rng, 5, 3);
      CHECK(ra_member_prefix(u, w) == ra_member_prefix(a, w));
    }
  }
}

TEST_CASE("ra_to_monitor: sink and universal guess") {
  RegisterAutomaton sink = monitor_to_ra(m_yes());
  MonitorPtr m = ra_to_monitor(sink);
  CHECK(render_monitor(m).find("yes") != std::string::npos);
  RegisterAutomaton bad;
  bad.registers = {"x"};
  bad.locations.resize(2);
  bad.locations[0].universal = true;
  bad.locations[1].accepting = true;
  bad.transitions = {guess_tr(0, 1, "x"), guard_tr(1, 1, "true")};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(ra_to_monitor(bad), DomainError);
}

TEST_CASE("liveness: trivial automata") {
  RegisterAutomaton all;
  all.registers = {"x"};
  all.locations.resize(2);
  all.locations[0].accepting = all.locations[1].accepting = true;
  all.transitions = {guard_tr(0, 1, "x=*")};
  Liveness l = nra_liveness(all);
  for (const auto &[k, v] : l.live)
    CHECK(v);

  RegisterAutomaton none;
  none.registers = {"x"};
  none.locations.resize(2);
  none.locations[1].accepting = true;
  Liveness n = nra_liveness(none);
  for (bool s : {false, true})
    CHECK_FALSE(n.is_live(0, type_of(s)));
}

TEST_CASE("liveness: first two equal") {
  RegisterAutomaton a = first_second();
  Liveness l = nra_liveness(a);
  CHECK(l.is_live(0, type_of(true)));
  CHECK(l.is_live(1, type_of(false)));
  CHECK_FALSE(l.is_live(1, type_of(true)));
  CHECK(l.is_live(2, type_of(false)));
  CHECK(l.is_live(3, type_of(true)));
  CHECK_FALSE(l.is_live(4, type_of(false)));
  // brute force from the start: some short word is accepted
  bool some = false;
  for (const Trace &w : words_up_to(3))
    some = some || ra_member_prefix(a, w);
  CHECK(some == l.is_live(0, type_of(true)));
}

TEST_CASE("liveness of the start agrees with word search") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    GenFormulaOptions g;
    g.seed = 800 + s;
    g.fragment = Fragment::disjHMLd;
    g.depth = 1 + static_cast<int>(s % 3);
    RegisterAutomaton a = monitor_to_ra(synthesize(gen_formula(g)));
    Liveness l = nra_liveness(a);
    std::vector<bool> sent(a.registers.size(), true);
    std::vector<int> block(a.registers.size());
    for (std::size_t r = 0; r < block.size(); ++r)
      block[r] = static_cast<int>(r);
    bool live = l.is_live(a.initial, normalize_type(block, sent));
    bool some = false;
    for (const Trace &w : words_up_to(4))
      if ((some = ra_member_prefix(a, w)))
        break;
    CHECK(live == some);
  }
}

TEST_CASE("detector: first two equal") {
  FormulaPtr f = nf("exists x. <*=x><*=x> tt");
  ViolationDetector d(f);
  CHECK_FALSE(d.bad());
  d.push("1");
  CHECK_FALSE(d.bad());
  d.push("2");
  REQUIRE(d.bad());
  CHECK(*d.bad_at() == 2);
  ViolationDetector e(f);
  e.push("1");
  e.push("1");
  CHECK_FALSE(e.bad());
  OptimalVerdict v = run_optimal(f, {"1", "1"});
  CHECK(v.accepted);
  CHECK(v.index == 2);
  OptimalVerdict r = run_optimal(f, {"1", "2"});
  CHECK(r.rejected);
  CHECK(r.index == 2);
}

TEST_CASE("detector: leak is never bad") {
  FormulaPtr f = nf(kLeak);
  for (const Trace &w : words_up_to(4)) {
    ViolationDetector d(f);
    for (const auto &x : w)
      d.push(x);
    CHECK_FALSE(d.bad());
  }
}

TEST_CASE("detector: unsatisfiable guard is bad at once") {
  ViolationDetector d(nf("<*!=*>tt"));
  REQUIRE(d.bad());
  CHECK(*d.bad_at() == 0);
  CHECK_THROWS_AS(ViolationDetector(nf("exists x. <*=x>tt & <*=x>tt")), DomainError);
}

TEST_CASE("detector: bad prefixes have no satisfying lasso") {
  std::mt19937_64 rng(43);
  int bad = 0;
  for (std::uint64_t s = 0; s < 120; ++s) {
    GenFormulaOptions g;
    g.seed = 1200 + s;
    g.fragment = Fragment::disjHMLd;
    g.depth = 1 + static_cast<int>(s % 4);
    FormulaPtr f = gen_formula(g);
    Trace w = random_word(rng, 5, 3);
    ViolationDetector d(f);
    for (const auto &x : w)
      d.push(x);
    if (!d.bad())
      continue;
    ++bad;
    Trace pre(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(*d.bad_at()));
    for (int j = 0; j < 50; ++j) {
      Lasso t{pre, random_loop(rng, pre)};
      INFO(render_formula(f), " on ", render_lasso(t));
      CHECK_FALSE(lasso_eval(f, t));
    }
  }
  CHECK(bad > 0);
}

TEST_SUITE_END();
