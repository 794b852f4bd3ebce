#pragma once

#include <optional>

#include "lamlab/occurrence.hpp"
#include "lamlab/reduce.hpp"

namespace lamlab {

struct NoGoodBranchError : std::runtime_error {
  explicit NoGoodBranchError(const std::string& what) : std::runtime_error(what) {}
};

struct AnalysisConfig {
  std::string x = "x";
  uint32_t levels = 8;  // K
  Fuel fuel;
  uint32_t level_gk_budget = 16;   // gk powers searched per level advance
  uint32_t event_threshold = 3;    // distinct S_k sources needed for case 2a
  uint32_t stability_window = 3;   // trailing levels that must agree
  uint32_t unstable_threshold = 2; // head-in-sigma-domain hits for instability
};

struct GoodStatus {
  enum class V { Good, NotGood, Unknown } v = V::Unknown;
  std::string reason;
};

struct LevelOcc {
  size_t id = 0;     // index among the pure occurrences of this level
  Path path;
  std::vector<Path> arg_paths;
  std::vector<TermPtr> args_named;
  std::optional<size_t> parent;  // id at the previous level
  GoodStatus good;
};

struct Level {
  uint32_t gk_power = 0;  // iterate count from F
  TermPtr term;
  std::vector<TraceStep> steps_from_prev;
  std::vector<LevelOcc> occs;  // pure occurrences only; ids are positions here
  size_t impure_count = 0;
};

// The occurrence tree: level k holds the pure occurrences of x in F_k, edges
// are the residual relation along the reduction between consecutive levels.
// Levels advance along the Gross-Knuth iterates of F, taking the next iterate
// whose occurrence profile (argument lists of the pure occurrences) changed,
// so each level reflects one visible unfolding step.
struct Tree {
  TermPtr F, A;
  std::string x;
  std::vector<Level> levels;
  NamingTable names;
  bool truncated = false;  // construction stopped early (size/fuel)
};

Tree tree_levels(const TermPtr& F, const std::string& x, const TermPtr& A,
                 const AnalysisConfig& cfg, const RuleSet& rules);

// Good = pure, and every enclosing subterm stays solvable under x := A.
GoodStatus good_check(const TermPtr& level_term, const Path& occ, const std::string& x,
                      const TermPtr& A, const RuleSet& rules, const Fuel& fuel);

struct BranchLevel {
  size_t occ_id = 0;
  std::vector<TermPtr> U, R, S, V;
  // origin of each V element: (source level k, index in S_k); V_0 elements
  // carry source == SIZE_MAX
  std::vector<std::pair<size_t, size_t>> v_origin;
  SubstMap sigma;  // the gap substitution into level k+1 (empty on the last level)
  // rho-recurrence data
  TermPtr t_term;
  HeadOutcome::Kind t_kind = HeadOutcome::Kind::FuelExhausted;
  uint32_t t_binders = 0;
  std::string t_head_key;  // "bound:<level>" | "free:<name>" | "const:<name>"
  std::string t_head_name;
  bool head_in_sigma_dom = false;
};

struct HeadEvent {
  uint32_t run_k = 0;      // which rho run observed it
  size_t source_k = 0;     // the S_k the element came from
  size_t source_idx = 0;
  uint64_t state_no = 0;
};

struct BranchData {
  std::vector<BranchLevel> levels;
  std::vector<HeadEvent> events;
  bool rho_complete = true;  // every t_k reached an hnf
};

BranchData find_good_branch(Tree& tree, const AnalysisConfig& cfg, const RuleSet& rules);

void compute_head_events(BranchData& branch, const TermPtr& A, const std::string& x,
                         const AnalysisConfig& cfg, const RuleSet& rules);

struct CaseReport {
  enum class Verdict { Case1, Case2a, Case2bSuspect, Inconclusive } verdict;
  std::optional<uint32_t> bound_l;
  enum class HeadStability { StableBound, StableFree, Unstable } head_stability;
  size_t event_sources = 0;
  uint32_t levels_explored = 0;
  uint64_t fuel_steps = 0;
};

CaseReport classify(const BranchData& branch, const AnalysisConfig& cfg);

// F_k as an operation: the k-th Gross-Knuth iterate.
TermPtr fk(const TermPtr& F, uint32_t k, const RuleSet& rules);

}  // namespace lamlab
