#pragma once

#include "lamlab/branch.hpp"
#include "lamlab/reduce.hpp"

namespace lamlab {

struct UnstableHeadVariableError : std::runtime_error {
  UnstableHeadVariableError()
      : std::runtime_error(
            "the head variable of t_k is substituted infinitely often; "
            "the wrapper construction does not apply") {}
};

// Which constants form the active J machinery, and the protected variable.
struct JContext {
  std::vector<std::string> j_consts;
  std::string nu = "nu";
  bool is_j(const std::string& n) const {
    for (const auto& c : j_consts)
      if (c == n) return true;
    return false;
  }
};
JContext j_context(const RuleSet& rules, std::string nu = "nu");

// (J a u) |> \y_1...y_p. (u (J a y_1) ... (J a y_p)), J of arity 2.
RuleSet make_J(uint32_t p, const std::string& name = "J", RuleSet base = {});

// J_0..J_N of arity 2 with (J_n a u) |> \y_1..y_{h_n}.(u (J_{n+1} a y_1)...);
// the last level uses the inert constant Gamma instead of J_{N+1}, or refuses
// to fire when gamma_fallback is off.
RuleSet make_J_family(const std::vector<uint32_t>& h, bool gamma_fallback = true,
                      const std::string& prefix = "J", const std::string& gamma = "Gamma",
                      RuleSet base = {});

// Membership in the grammar E_u = u | (J nu e_u) | \y...(e_u e_y...).
struct InE {
  bool member = false;
  bool budget_exhausted = false;
};
InE in_E(const TermPtr& t, const TermPtr& u, const JContext& ctx, uint32_t budget = 4096);

// One forward expansion step: replace the subterm at `at` by (J nu <subterm>).
TermPtr j_expand(const TermPtr& t, const Path& at, const std::string& j_name,
                 const std::string& nu = "nu");

// nu occurs nicely: every occurrence sits as the immediate second argument of
// a J constant.
bool occurs_nicely(const TermPtr& t, const JContext& ctx);

// nu occurs correctly: nicely, and the hnf matches \x...(x c... e_y...) for a
// final subsequence y of the binders (length >= 1) with each e_y in E_y and
// nu occurring among them.
struct Correctly {
  enum class V { Yes, No, Unknown } v = V::Unknown;
  uint32_t tail_len = 0;
  std::string note;
};
Correctly occurs_correctly(const TermPtr& t, const JContext& ctx, const RuleSet& rules,
                           const Fuel& fuel, uint32_t in_e_budget = 4096);

// A' = \x_1...x_l \z. (z nu)
TermPtr build_Aprime_simple(uint32_t l, const std::string& nu = "nu");

// A' = (J nu A) with p = lg(z) + l + 2 read off the classified branch.
struct Case1Aprime {
  TermPtr aprime;
  uint32_t p = 0;
  RuleSet rules;
};
Case1Aprime build_Aprime_case1(const TermPtr& A, const BranchData& branch,
                               const CaseReport& report, const RuleSet& base = {},
                               const std::string& nu = "nu");

// The arity sequence h of the staged wrapper, computed from the branch data
// by probing with fake constant families (Gamma standing in for the next
// level). Level n records j_n, h_n, lg(X_{j_n}), a_{j_n} and B_{j_n}; levels
// past 0 also record the arithmetic inputs l_{j_{n-1}} and lg(B' :: T).
struct HPrefix {
  struct Level {
    size_t j = 0;
    uint32_t h = 0;
    uint32_t x_len = 0;
    TermPtr a;
    std::vector<TermPtr> b;
    uint32_t l_used = 0;   // level 0: l_0; later: l_{j_{n-1}}
    uint32_t bt_len = 0;   // later levels: lg(B' :: T)
    uint32_t v_len = 0;    // level 0: lg(V_{j_0})
  };
  std::vector<Level> levels;
  bool horizon_exhausted = false;
  std::string note;
};
HPrefix compute_h(const BranchData& branch, const TermPtr& A, const std::string& x,
                  uint32_t budget_levels, const AnalysisConfig& cfg, const RuleSet& rules);

// The pure lambda staged wrapper built from a closed term computing h on
// Church numerals, via the Turing fixed point.
TermPtr build_Jhat_pure(const TermPtr& h_term);

// Bounded persistence verification over the beta/Omega reduct space.
struct PersistBudget {
  uint32_t depth = 6;
  uint32_t breadth = 200;
  Fuel fuel;
};

struct PersistenceVerdict {
  enum class Kind { ViolationApplied, ViolationErased, NoViolationFound } kind;
  ReductionTrace witness;  // for violations: a replayable trace to the bad reduct
  uint64_t explored = 0;
  uint32_t max_depth = 0;
  uint64_t steps_used = 0;
  uint64_t scan_hits = 0;  // reducts containing the scan term, when scanning
};

PersistenceVerdict check_persistence(const TermPtr& F_inst, const RuleSet& rules,
                                     const PersistBudget& budget,
                                     const std::string& nu = "nu",
                                     const TermPtr& scan_for = nullptr);

// Does `target` occur as a subterm (up to alpha) anywhere in t?
bool subterm_occurs(const TermPtr& t, const TermPtr& target);

}  // namespace lamlab
