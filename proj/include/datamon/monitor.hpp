#pragma once

#include "datamon/core.hpp"

#include <functional>
#include <json.hpp>
#include <unordered_set>

namespace datamon {

struct Monitor;
using MonitorPtr = std::shared_ptr<const Monitor>;

enum class MKind { Yes, End, Guard, Guess, Or, And, Rec, Var };

struct Monitor {
  MKind kind = MKind::Yes;
  BExprPtr guard;   // Guard
  std::string name; // Guess variable, Rec/Var recursion variable
  MonitorPtr a, b;
};

MonitorPtr m_yes();
MonitorPtr m_end();
MonitorPtr m_guard(BExprPtr b, MonitorPtr m);
MonitorPtr m_guess(std::string x, MonitorPtr m);
MonitorPtr m_or(MonitorPtr l, MonitorPtr r);
MonitorPtr m_and(MonitorPtr l, MonitorPtr r);
MonitorPtr m_rec(std::string X, MonitorPtr m);
MonitorPtr m_var(std::string X);

// yes | end | (b).m | guess x. m | rec X. m | X | m + n | m & n
// '&' binds tighter than '+'; guess and rec extend to the right
MonitorPtr parse_monitor(const std::string &text);
std::string render_monitor(const MonitorPtr &m);
bool monitor_equal(const MonitorPtr &a, const MonitorPtr &b);
std::size_t monitor_size(const MonitorPtr &m);
std::set<std::string> monitor_data_vars(const MonitorPtr &m);
// recursion variables occurring outside any guard prefix of their binder
bool monitor_guarded(const MonitorPtr &m);

// Compositional synthesis for cHMLd (ff maps to end).
MonitorPtr synthesize(const FormulaPtr &f);

// ---------------------------------------------------------------------------
// Symbolic runtime

// Flattened program shared by monitors and register automata.
struct Program {
  enum class Kind : std::uint8_t { Yes, End, AcceptAtEnd, Read, ReadUniv, Guess, Or, And, Jump };
  struct Node {
    Kind kind = Kind::End;
    BExprPtr bguard;
    GuardCode guard;
    int var = -1;
    int next = -1; // Read, ReadUniv, Guess, Jump
    std::vector<int> kids;
    int tag = -1; // owner id, e.g. automaton location
  };
  std::vector<Node> nodes;
  std::vector<std::string> vars;
  int root = 0;
  // monitors reject tau-cycles; automata treat them as non-accepting
  bool automaton_mode = false;

  int var_index(const std::string &v);
};

Program compile_monitor(const MonitorPtr &m);

// Reserved prefix of values that never occur in traces (initial registers).
extern const std::string kSentinelPrefix;
bool is_sentinel(const DataValue &v);

struct Val {
  int sym = -1;     // symbol id when >= 0
  DataValue conc;   // concrete value otherwise
  bool operator==(const Val &o) const { return sym == o.sym && conc == o.conc; }
};

struct Sym {
  std::set<DataValue> excl; // concrete values the symbol differs from
  std::set<int> diseq;      // symbols it differs from
};

struct CTree {
  enum class Kind : std::uint8_t { Leaf, Or, And };
  Kind kind = Kind::Leaf;
  int node = -1; // program node of a leaf
  std::vector<Val> env;
  std::vector<CTree> kids;
};

struct Config {
  CTree root;
  std::map<int, Sym> syms;
};

class Engine {
public:
  explicit Engine(std::shared_ptr<const Program> p);

  std::vector<Config> initial() const;
  std::vector<Config> step(const std::vector<Config> &cs, const DataValue &d) const;
  // configs whose tree is the single leaf yes
  static bool has_yes(const std::vector<Config> &cs);
  // evaluation at the end of input: yes and accept-at-end leaves hold
  bool accepts_at_end(const std::vector<Config> &cs) const;
  const Program &program() const { return *p_; }

  std::string key(const Config &c) const;

private:
  std::shared_ptr<const Program> p_;
  std::vector<std::vector<char>> live_;
  std::vector<char> can_accept_;
  CTree expand(int node, std::vector<Val> env, Config &c, std::vector<int> &stack) const;
  void finish(Config &c, std::vector<Config> &out, std::unordered_set<std::string> &seen) const;
};

struct Verdict {
  bool accepted = false;
  std::size_t index = 0; // number of events consumed when the verdict fired
  std::size_t configs_peak = 0;
};

Verdict run(const MonitorPtr &m, const Trace &w);
Verdict run_violation(const FormulaPtr &f, const Trace &w);

// Streaming monitor; push returns true once the verdict fired.
class MonitorSession {
public:
  explicit MonitorSession(const MonitorPtr &m);
  bool push(const DataValue &d);
  bool accepted() const { return verdict_.accepted; }
  const Verdict &verdict() const { return verdict_; }
  std::size_t configs() const { return cs_.size(); }

private:
  Engine eng_;
  std::vector<Config> cs_;
  Verdict verdict_;
  std::size_t consumed_ = 0;
};

enum class TwoVerdict { Good, Bad, Undecided };

// Recognizer for HMLd: decides after exactly modal-height many events.
class HmldMonitor {
public:
  explicit HmldMonitor(const FormulaPtr &f);
  std::size_t horizon() const { return n_; }
  TwoVerdict classify(const Trace &w) const;

private:
  FormulaPtr f_;
  std::size_t n_ = 0;
};

} // namespace datamon
