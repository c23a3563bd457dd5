#pragma once

#include "datamon/core.hpp"
#include "datamon/flat.hpp"

#include <json.hpp>

namespace datamon {

// Budget in explored states; DATAMON_BUDGET overrides the default.
std::size_t default_budget();

struct OracleOptions {
  std::size_t state_cap = 0; // 0 = default_budget()
  // fresh representatives beyond the quantifier nesting depth
  std::size_t extra_fresh = 0;
};

// Decides t in [[f, env0]] with quantifiers ranging over the values of t,
// the values of env0 and quantifier-depth many fresh values.
bool lasso_eval(const FormulaPtr &f, const Lasso &t, const DataEnv &env0 = {}, const OracleOptions &opt = {});

struct AnnotationNode {
  std::string path; // subterm address, see FlatNode::path
  DataEnv env;
  std::size_t pos = 0; // lasso position
  bool operator<(const AnnotationNode &o) const {
    return std::tie(path, env, pos) < std::tie(o.path, o.env, o.pos);
  }
  bool operator==(const AnnotationNode &o) const = default;
};

struct GforallWitness {
  std::vector<DataValue> D;
  DataValue d_star;
};

struct Annotation {
  std::vector<AnnotationNode> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  // guarded-branching annotations only, keyed by node index
  std::map<std::size_t, GforallWitness> witnesses;
};

nlohmann::json annotation_to_json(const Annotation &a, const FormulaPtr &f);
Annotation annotation_from_json(const nlohmann::json &j);

struct CheckResult {
  bool ok = false;
  std::string reason;
  explicit operator bool() const { return ok; }
};

// Finite annotation check: every local clause, no ff node, acyclic, and the
// root (f, env0, 0) is present.  f is normalized internally; the subterm
// paths of f and of its normal form coincide.
CheckResult check_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t, const Annotation &a);

// Minimal-height finite annotation for f in cHMLd; nullopt when none exists.
std::optional<Annotation> find_finite_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t,
                                                 std::size_t budget = 0);

// Guarded-branching annotation check for f accepted by check_guarded.
CheckResult check_guarded_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t, const Annotation &a);

// Guarded-branching annotation on a lasso; the witness set D of each guarded
// universal holds the values its guard reads plus the environment values.
std::optional<Annotation> find_guarded_annotation(const FormulaPtr &f, const DataEnv &env0, const Lasso &t,
                                                  std::size_t budget = 0);

enum class PrefixVerdict { Good, Unknown };

struct GoodPrefixResult {
  PrefixVerdict verdict = PrefixVerdict::Unknown;
  bool budget_exhausted = false;
  std::size_t states = 0;
};

// Sound check that every extension of w satisfies f (f in minHMLdG).
GoodPrefixResult good_prefix_guarded(const FormulaPtr &f, const Trace &w, const DataEnv &env0 = {},
                                     std::size_t budget = 0);

// Incremental prover behind good_prefix_guarded; results that never looked
// at the end of the buffered prefix survive across feeds.
class GuardedProver {
public:
  GuardedProver(const FormulaPtr &f, const DataEnv &env0, std::size_t budget);
  ~GuardedProver();
  GuardedProver(GuardedProver &&) noexcept;
  GuardedProver &operator=(GuardedProver &&) noexcept;

  void push(const DataValue &d);
  GoodPrefixResult check();
  std::size_t length() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace datamon
