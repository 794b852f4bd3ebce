#pragma once

#include <map>
#include <optional>

#include "lamlab/reduce.hpp"

namespace lamlab {

struct StaleOccurrenceError : std::runtime_error {
  explicit StaleOccurrenceError(const std::string& what) : std::runtime_error(what) {}
};

// One occurrence of a free variable, identified by its leaf path. Ids are the
// preorder rank, so leftmost occurrences come first.
struct Occurrence {
  size_t id = 0;
  Path path;
};

std::vector<Occurrence> occurrences_of(const TermPtr& t, const std::string& x);

// The maximal applicative spine above the occurrence: paths of the argument
// subterms of ([] V), left to right. Empty when the occurrence is itself an
// argument or an abstraction body.
std::vector<Path> arg_paths_of(const TermPtr& t, const Occurrence& occ);
std::vector<TermPtr> args_of(const TermPtr& t, const Occurrence& occ);
// Same, with dangling indices replaced by stable binder names.
std::vector<TermPtr> args_of_named(const TermPtr& t, const Occurrence& occ,
                                   NamingTable& names);

// An occurrence is pure when it lies in no other occurrence's argument list.
bool is_pure(const TermPtr& t, const Occurrence& occ, const std::string& x);

// Residual map of the occurrences of `x` through one contraction.
struct ResidualStep {
  TermPtr before, after;
  TraceStep step;
  std::vector<Occurrence> before_occs, after_occs;
  std::map<size_t, std::vector<size_t>> map;  // before id -> after ids (may be empty)
};
ResidualStep residuals(const TermPtr& t, const TraceStep& step, const std::string& x,
                       const RuleSet& rules);

// If the step beta-substitutes into the region containing `occ`, the binder
// substitution it applies there, in named form.
std::optional<std::pair<std::string, TermPtr>> step_substitution(const TermPtr& t,
                                                                 const TraceStep& step,
                                                                 const Path& occ,
                                                                 NamingTable& names);

}  // namespace lamlab
