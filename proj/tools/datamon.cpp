#include "datamon/cli.hpp"
#include "datamon/guard.hpp"
#include "datamon/oracle.hpp"
#include "datamon/ra.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

using namespace datamon;

namespace {

std::string text_or_file(const std::string &arg) {
  std::ifstream probe(arg);
  if (probe.good())
    return read_text_file(arg);
  return arg;
}

FormulaPtr load_formula(const std::string &arg) { return parse_formula(text_or_file(arg)); }

MonitorPtr load_monitor(const std::string &arg) { return parse_monitor(text_or_file(arg)); }

RegisterAutomaton load_ra(const std::string &arg) {
  try {
    return ra_from_json(nlohmann::json::parse(text_or_file(arg)));
  } catch (const nlohmann::json::exception &e) {
    throw DomainError(std::string("automaton json: ") + e.what());
  }
}

DataEnv parse_env(const std::vector<std::string> &items) {
  DataEnv env;
  for (const auto &s : items) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--env", "expected name=value, got '" + s + "'");
    env[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return env;
}

void emit(const std::string &command, const std::string &inputs, const nlohmann::json &result) {
  std::cout << run_report(command, inputs, result).dump() << std::endl;
}

nlohmann::json verdict_json(const Verdict &v, const std::string &yes) {
  return {{"verdict", v.accepted ? yes : "none"}, {"index", v.index}, {"configs_peak", v.configs_peak}};
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"datamon: formulas, monitors and register automata over data words"};
  app.require_subcommand(1);

  std::string formula, trace, lasso, monitor_arg, ra_arg, mode = "sat", fragment = "cHMLd", format = "auto";
  std::vector<std::string> env_items;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  int depth = 3, vars = 2;
  std::size_t length = 6, alphabet = 3;
  bool as_lasso = false, stream = false, prefix = false, guarded = false;

  auto add_env = [&](CLI::App *c) { c->add_option("--env", env_items, "free variable binding name=value"); };

  auto *parse = app.add_subcommand("parse", "parse, normalize and render a formula");
  parse->add_option("formula", formula, "formula file or text")->required();
  auto *classify_cmd = app.add_subcommand("classify", "syntactic fragment membership");
  classify_cmd->add_option("formula", formula)->required();
  auto *dualize_cmd = app.add_subcommand("dualize", "De Morgan dual");
  dualize_cmd->add_option("formula", formula)->required();
  auto *check_guarded_cmd = app.add_subcommand("check-guarded", "membership in the guarded fragment");
  check_guarded_cmd->add_option("formula", formula)->required();
  std::vector<std::string> V, F;
  check_guarded_cmd->add_option("--guarded-vars", V);
  check_guarded_cmd->add_option("--free-vars", F);
  auto *gd_cmd = app.add_subcommand("gd", "guarded form of a max-free formula");
  gd_cmd->add_option("formula", formula)->required();
  gd_cmd->add_option("--free-vars", F);
  auto *synth = app.add_subcommand("synthesize", "monitor of a cHMLd formula");
  synth->add_option("formula", formula)->required();

  auto *mon = app.add_subcommand("monitor", "run monitors");
  mon->require_subcommand(1);
  auto *mrun = mon->add_subcommand("run", "run a monitor over a trace");
  mrun->add_option("--formula", formula);
  mrun->add_option("--monitor", monitor_arg);
  mrun->add_option("--trace", trace, "inline comma separated values or a trace file")->required();
  mrun->add_option("--format", format)->check(CLI::IsMember({"auto", "lines", "json"}));
  mrun->add_option("--mode", mode)->check(CLI::IsMember({"sat", "viol"}));
  auto *mstream = mon->add_subcommand("stream", "read one value per line from standard input");
  mstream->add_option("--formula", formula);
  mstream->add_option("--monitor", monitor_arg);
  mstream->add_option("--mode", mode)->check(CLI::IsMember({"sat", "viol"}));
  auto *mguard = mon->add_subcommand("guarded", "good-prefix monitor for minHMLd via gd");
  mguard->add_option("--formula", formula)->required();
  mguard->add_option("--trace", trace);
  mguard->add_flag("--stream", stream);
  mguard->add_option("--budget", budget);
  add_env(mguard);
  auto *mopt = mon->add_subcommand("optimal", "satisfaction monitor with bad-prefix detection (disjHMLd)");
  mopt->add_option("--formula", formula)->required();
  mopt->add_option("--trace", trace)->required();
  auto *mhml = mon->add_subcommand("hmld", "two-verdict monitor for HMLd");
  mhml->add_option("--formula", formula)->required();
  mhml->add_option("--trace", trace)->required();

  auto *ra = app.add_subcommand("ra", "register automata");
  ra->require_subcommand(1);
  auto *rfrom = ra->add_subcommand("from-monitor", "automaton of a monitor");
  rfrom->add_option("--monitor", monitor_arg);
  rfrom->add_option("--formula", formula);
  auto *rto = ra->add_subcommand("to-monitor", "monitor of an irrevocable automaton");
  rto->add_option("--ra", ra_arg)->required();
  auto *rmem = ra->add_subcommand("member", "membership of a finite word");
  rmem->add_option("--ra", ra_arg)->required();
  rmem->add_option("--trace", trace)->required();
  rmem->add_flag("--prefix", prefix, "accept when some prefix is accepted");
  auto *rlive = ra->add_subcommand("liveness", "live (location, type) pairs");
  rlive->add_option("--ra", ra_arg)->required();

  auto *orc = app.add_subcommand("oracle", "brute-force semantics on lassos");
  orc->require_subcommand(1);
  auto *oeval = orc->add_subcommand("eval", "decide a lasso");
  oeval->add_option("--formula", formula)->required();
  oeval->add_option("--lasso", lasso)->required();
  oeval->add_option("--budget", budget);
  add_env(oeval);
  auto *oann = orc->add_subcommand("annotate", "finite annotation as JSON");
  oann->add_option("--formula", formula)->required();
  oann->add_option("--lasso", lasso)->required();
  oann->add_option("--budget", budget);
  oann->add_flag("--guarded", guarded, "guarded-branching annotation");
  add_env(oann);

  auto *gen = app.add_subcommand("gen", "seeded generators");
  gen->require_subcommand(1);
  auto *gform = gen->add_subcommand("formula", "random formula");
  gform->add_option("--seed", seed);
  gform->add_option("--fragment", fragment);
  gform->add_option("--depth", depth)->check(CLI::NonNegativeNumber);
  gform->add_option("--vars", vars)->check(CLI::NonNegativeNumber);
  auto *gtrace = gen->add_subcommand("trace", "random trace or lasso");
  gtrace->add_option("--seed", seed);
  gtrace->add_option("--length", length);
  gtrace->add_option("--alphabet", alphabet)->check(CLI::PositiveNumber);
  gtrace->add_flag("--lasso", as_lasso);
  auto *gmon = gen->add_subcommand("monitor", "random guarded monitor");
  gmon->add_option("--seed", seed);
  gmon->add_option("--depth", depth)->check(CLI::NonNegativeNumber);
  gmon->add_option("--vars", vars)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  auto pick_monitor = [&]() -> MonitorPtr {
    if (!monitor_arg.empty())
      return load_monitor(monitor_arg);
    if (formula.empty())
      throw CLI::ValidationError("--formula", "either --formula or --monitor is required");
    FormulaPtr f = normalize(load_formula(formula), true).formula;
    if (mode == "viol") {
      if (!in_fragment(f, Fragment::sHMLd))
        throw DomainError("violation mode needs an sHMLd formula");
      f = dualize(f);
    }
    return synthesize(f);
  };

  try {
    if (*parse) {
      FormulaPtr f = load_formula(formula);
      NormalizeResult n = normalize(f, false);
      emit("parse", formula,
           {{"formula", render_formula(f)}, {"normalized", render_formula(n.formula)}, {"warnings", n.warnings}});
    } else if (*classify_cmd) {
      FormulaPtr f = normalize(load_formula(formula), false).formula;
      emit("classify", formula, report_to_json(classify(f)));
    } else if (*dualize_cmd) {
      emit("dualize", formula, {{"formula", render_formula(dualize(load_formula(formula)))}});
    } else if (*check_guarded_cmd) {
      FormulaPtr f = normalize(load_formula(formula), false).formula;
      GuardedCheck c = check_guarded(f, V, F);
      emit("check-guarded", formula,
           {{"guarded", c.ok}, {"reason", c.reason}, {"path", c.path}, {"derivation", c.derivation}});
      return c.ok ? 0 : 1;
    } else if (*gd_cmd) {
      FormulaPtr g = gd(load_formula(formula), {}, F);
      emit("gd", formula, {{"formula", render_formula(g)}, {"guarded", check_guarded(g, {}, F).ok}});
    } else if (*synth) {
      FormulaPtr f = normalize(load_formula(formula), true).formula;
      emit("synthesize", formula, {{"monitor", render_monitor(synthesize(f))}});
    } else if (*mrun) {
      MonitorPtr m = pick_monitor();
      Verdict v = run(m, load_trace(trace, format));
      emit("monitor run", formula + monitor_arg + "|" + trace + "|" + mode,
           verdict_json(v, mode == "viol" ? "rejected" : "accepted"));
    } else if (*mstream) {
      MonitorSession s(pick_monitor());
      std::string yes = mode == "viol" ? "rejected" : "accepted";
      auto fire = [&]() {
        std::cout << nlohmann::json{{"verdict", yes}, {"index", s.verdict().index}}.dump() << std::endl;
      };
      if (s.accepted()) {
        fire();
        return 0;
      }
      std::string line;
      while (std::getline(std::cin, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
          continue;
        auto e = line.find_last_not_of(" \t\r");
        if (s.push(line.substr(b, e - b + 1))) {
          fire();
          return 0;
        }
      }
    } else if (*mguard) {
      DataEnv env = parse_env(env_items);
      GuardedSession s = guard_pipeline(load_formula(formula), env, budget);
      if (stream) {
        std::string line;
        while (std::getline(std::cin, line)) {
          auto b = line.find_first_not_of(" \t\r");
          if (b == std::string::npos)
            continue;
          auto e = line.find_last_not_of(" \t\r");
          GuardStatus st = s.feed(line.substr(b, e - b + 1));
          if (st == GuardStatus::Good) {
            std::cout << nlohmann::json{{"verdict", "good"}, {"index", *s.good_at()}}.dump() << std::endl;
            return 0;
          }
          if (st == GuardStatus::Stalled)
            std::cout << nlohmann::json{{"status", "stalled"}, {"index", s.length()}}.dump() << std::endl;
        }
      } else {
        for (const auto &d : load_trace(trace))
          if (s.feed(d) == GuardStatus::Good)
            break;
        nlohmann::json r{{"verdict", s.status() == GuardStatus::Good ? "good" : "none"},
                         {"status", guard_status_name(s.status())},
                         {"stalls", s.stalls()},
                         {"states", s.states()},
                         {"formula", render_formula(s.formula())}};
        if (s.good_at())
          r["index"] = *s.good_at();
        emit("monitor guarded", formula + "|" + trace, r);
      }
    } else if (*mopt) {
      OptimalVerdict v = run_optimal(normalize(load_formula(formula), true).formula, load_trace(trace));
      emit("monitor optimal", formula + "|" + trace,
           {{"verdict", v.accepted ? "accepted" : v.rejected ? "rejected" : "none"}, {"index", v.index}});
    } else if (*mhml) {
      HmldMonitor h(load_formula(formula));
      Trace w = load_trace(trace);
      TwoVerdict v = h.classify(w);
      emit("monitor hmld", formula + "|" + trace,
           {{"verdict", v == TwoVerdict::Good ? "good" : v == TwoVerdict::Bad ? "bad" : "undecided"},
            {"horizon", h.horizon()}});
    } else if (*rfrom) {
      std::cout << ra_to_json(monitor_to_ra(pick_monitor())).dump(2) << std::endl;
    } else if (*rto) {
      emit("ra to-monitor", ra_arg, {{"monitor", render_monitor(ra_to_monitor(load_ra(ra_arg)))}});
    } else if (*rmem) {
      RegisterAutomaton a = load_ra(ra_arg);
      Trace w = load_trace(trace);
      emit("ra member", ra_arg + "|" + trace, {{"member", prefix ? ra_member_prefix(a, w) : ra_member(a, w)}});
    } else if (*rlive) {
      RegisterAutomaton a = load_ra(ra_arg);
      emit("ra liveness", ra_arg, liveness_to_json(a, nra_liveness(a)));
    } else if (*oeval) {
      OracleOptions opt;
      opt.state_cap = budget;
      bool r = lasso_eval(normalize(load_formula(formula), true).formula, parse_lasso(lasso), parse_env(env_items),
                          opt);
      std::cout << (r ? "true" : "false") << std::endl;
    } else if (*oann) {
      FormulaPtr f = normalize(load_formula(formula), true).formula;
      Lasso t = parse_lasso(lasso);
      DataEnv env = parse_env(env_items);
      auto a = guarded ? find_guarded_annotation(f, env, t, budget) : find_finite_annotation(f, env, t, budget);
      if (!a) {
        std::cerr << "no annotation: the lasso does not satisfy the formula" << std::endl;
        return 1;
      }
      std::cout << annotation_to_json(*a, f).dump(2) << std::endl;
    } else if (*gform) {
      GenFormulaOptions o;
      o.seed = seed;
      o.depth = depth;
      o.vars = vars;
      try {
        o.fragment = parse_fragment(fragment);
        std::cout << render_formula(gen_formula(o)) << std::endl;
      } catch (const DomainError &e) {
        std::cerr << "usage: " << e.what() << std::endl;
        return 2;
      }
    } else if (*gtrace) {
      if (as_lasso)
        std::cout << render_lasso(gen_lasso(seed, length, alphabet)) << std::endl;
      else
        std::cout << render_trace(gen_trace(seed, length, alphabet)) << std::endl;
    } else if (*gmon) {
      std::cout << render_monitor(gen_monitor(seed, depth, vars)) << std::endl;
    }
  } catch (const CLI::ValidationError &e) {
    std::cerr << "usage: " << e.what() << std::endl;
    return 2;
  } catch (const SyntaxError &e) {
    std::cerr << "syntax error: " << e.what() << std::endl;
    return 1;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
