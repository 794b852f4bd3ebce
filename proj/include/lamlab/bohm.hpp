#pragma once

#include "lamlab/reduce.hpp"

namespace lamlab {

// Depth-bounded Boehm tree. Bottom leaves come only from certified cycles in
// the head reduction, so shape differences are sound evidence of inequality
// in the theory that equates unsolvables.
struct BohmPrefix {
  enum class Tag { Node, Bottom, Unknown, Cut } tag = Tag::Cut;
  uint32_t binders = 0;
  enum class HeadKind { Bound, Free, Const } head_kind = HeadKind::Free;
  // Bound heads are identified by de Bruijn level counted from the prefix
  // root so that nodes of two different terms compare meaningfully.
  int64_t head_level = 0;
  std::string head_name;
  std::vector<BohmPrefix> children;
};

BohmPrefix bohm_prefix(const TermPtr& t, uint32_t depth, const RuleSet& rules,
                       const Fuel& fuel);

struct HEqual {
  enum class Verdict { Distinct, AgreeToDepth, Unknown } verdict;
  std::vector<size_t> witness;  // child-index path to the distinguishing node
  std::string detail;
};

// Bounded approximation of equality modulo beta/Omega. Distinct is returned
// only on certified shape mismatches (exact hnf comparison, no eta padding)
// or certified-bottom vs certified-hnf, so Distinct soundly implies the two
// terms are not equal in the theory.
HEqual h_equal_bounded(const TermPtr& t1, const TermPtr& t2, uint32_t depth,
                       const RuleSet& rules, const Fuel& fuel);

}  // namespace lamlab
