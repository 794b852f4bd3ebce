#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lamlab/rules.hpp"
#include "lamlab/term.hpp"

namespace lamlab {

// Budget for engine loops. Every loop decrements max_steps and aborts
// deterministically at zero; undecidable questions become budget-relative.
struct Fuel {
  uint64_t max_steps = 10000;
  size_t max_size = 1000000;
  uint32_t max_depth = 64;
};

// One recorded contraction. `rule` is "beta", "const:<Name>" or "omega".
struct TraceStep {
  Path at;
  std::string rule;
};

struct ReductionTrace {
  TermPtr start;
  std::vector<TraceStep> steps;
  TermPtr end;
};

struct Redex {
  Path at;
  std::string rule;  // "beta" or "const:<Name>"
};

// All beta-redexes and fully-applied constant redexes, leftmost-outermost.
std::vector<Redex> redexes(const TermPtr& t, const RuleSet& rules);

// Contract the redex at `at`. For "omega" replaces the subterm by the literal
// Omega without certification (replay_trace re-certifies).
TermPtr apply_step(const TermPtr& t, const Path& at, const std::string& rule,
                   const RuleSet& rules);

// Residual tracking through a single contraction -------------------------

struct StepGeometry {
  Path at;
  bool is_beta = false;
  bool is_omega = false;
  size_t n_args = 0;  // constant arity (1 for beta: the single argument)
  // Positions, relative to the contractum root, where copies of argument j
  // land (beta: j == 0 is the redex argument).
  std::vector<std::vector<Path>> insert_positions;
};

StepGeometry step_geometry(const TermPtr& t, const Path& at, const std::string& rule,
                           const RuleSet& rules);
// Residual positions of the node at q after the contraction.
std::vector<Path> push_path(const StepGeometry& g, const Path& q);

// Developments ------------------------------------------------------------

// Contracts exactly the marked redexes (a complete development) as a
// sequence of single steps, innermost marks first so mark paths stay put.
// `tracked` path sets are pushed through every step.
struct DevelopResult {
  TermPtr term;
  std::vector<TraceStep> steps;
  std::vector<std::vector<Path>> tracked;
};
DevelopResult develop(const TermPtr& t, std::vector<Redex> marks, const RuleSet& rules,
                      std::vector<std::vector<Path>> tracked = {});

// Full development of all redexes present (the Gross-Knuth step).
TermPtr gross_knuth(const TermPtr& t, const RuleSet& rules);
TermPtr gk_iterate(const TermPtr& t, uint32_t k, const RuleSet& rules);

// Head reduction ----------------------------------------------------------

struct HeadOutcome {
  enum class Kind { Hnf, CycleCertified, FuelExhausted } kind;
  TermPtr hnf;  // Hnf: the full head normal form
  uint32_t binders = 0;
  TermPtr head;  // BoundVar / FreeVar / Const node
  std::vector<TermPtr> args;
  uint64_t steps_used = 0;
  uint64_t period = 0;  // CycleCertified
};

struct HeadEventHook {
  std::vector<Path> marked;  // subterm positions to watch
  // invoked the first time marked subterm i reaches a head-spine position
  std::function<void(size_t i, uint64_t step_no)> on_head;
};

std::optional<Redex> head_redex(const TermPtr& t, const RuleSet& rules);
HeadOutcome head_reduce(TermPtr t, const RuleSet& rules, const Fuel& fuel,
                        ReductionTrace* trace = nullptr, HeadEventHook* hook = nullptr);

// Strategy-driven reduction -----------------------------------------------

enum class Strategy { Head, Leftmost };

struct ReduceResult {
  enum class Status { NormalForm, Hnf, CycleCertified, FuelExhausted } status;
  ReductionTrace trace;
  uint64_t period = 0;
};

ReduceResult reduce(const TermPtr& t, Strategy strategy, const RuleSet& rules,
                    const Fuel& fuel);

// Solvability and Omega-collapse ------------------------------------------

struct Solvability {
  enum class Verdict { Solvable, Unsolvable, Unknown } verdict;
  HeadOutcome outcome;
};
Solvability solvability(const TermPtr& t, const RuleSet& rules, const Fuel& fuel);

struct CollapseResult {
  TermPtr term;
  std::vector<Path> unknown_subterms;  // left intact, flagged
};
CollapseResult omega_collapse(const TermPtr& t, const RuleSet& rules, const Fuel& fuel);

// Joins --------------------------------------------------------------------

// Bounded search for a common reduct (Gross-Knuth ladders, then mixed BFS).
struct JoinBudget {
  uint32_t gk_rounds = 8;
  uint32_t bfs_nodes = 400;
  Fuel fuel;
};
std::optional<TermPtr> joinable(const TermPtr& t1, const TermPtr& t2, const RuleSet& rules,
                                const JoinBudget& budget = {});

// Constructive join via Gross-Knuth cofinality: t3 = gk^max(|tr1|,|tr2|)(t)
// plus verified traces tr1.end |>* t3 and tr2.end |>* t3.
struct JoinResult {
  bool ok = false;
  std::string failure;
  TermPtr meet;
  ReductionTrace from1, from2;
};
JoinResult join_traces(const TermPtr& t, const ReductionTrace& tr1, const ReductionTrace& tr2,
                       const RuleSet& rules, const Fuel& fuel);

// Trace utilities -----------------------------------------------------------

// Replays the steps, validating each one (omega steps re-certify
// unsolvability within `fuel`); throws on mismatch, returns the end term.
TermPtr replay_trace(const ReductionTrace& tr, const RuleSet& rules, const Fuel& fuel);
bool replay_ok(const ReductionTrace& tr, const RuleSet& rules, const Fuel& fuel);

// Reorders an interleaved beta/omega trace into beta steps followed by omega
// steps with the same endpoints (postponement of Omega-reduction).
ReductionTrace reorder_beta_omega(const ReductionTrace& tr, const RuleSet& rules,
                                  const Fuel& fuel);

}  // namespace lamlab
