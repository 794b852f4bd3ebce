#pragma once

#include <json.hpp>

#include "lamlab/bohm.hpp"
#include "lamlab/branch.hpp"
#include "lamlab/persist.hpp"

namespace lamlab {

using Json = nlohmann::json;

Json trace_json(const ReductionTrace& tr);
Json bohm_json(const BohmPrefix& p);
Json level_json(const Level& lev);
Json branch_json(const BranchData& b);
Json analysis_json(const Tree& tree, const BranchData& b, const CaseReport& rep);
Json case_report_json(const CaseReport& rep);
Json persistence_json(const PersistenceVerdict& v);

std::string hequal_str(HEqual::Verdict v);
std::string verdict_str(CaseReport::Verdict v);
std::string stability_str(CaseReport::HeadStability s);

// Write JSON atomically (temp file + rename).
void write_json_atomic(const std::string& path, const Json& j);

// Range experiments ---------------------------------------------------------

// If F normalizes, the abstraction-armored numeral family witnesses an
// infinite range; otherwise growing iterate sizes are reported as evidence.
struct ShortcutResult {
  enum class Kind { InfiniteRange, NotNormalizable, Unknown } kind;
  uint32_t n = 0;  // size of the normal form
  TermPtr normal_form;
  std::vector<std::pair<std::string, std::string>> pair_verdicts;  // ("0/1", "Distinct")
  std::vector<size_t> gk_sizes;
  std::string note;
};
ShortcutResult normalizable_shortcut(const TermPtr& F, const std::string& x,
                                     const RuleSet& rules, const Fuel& fuel,
                                     uint32_t depth = 6);
Json shortcut_json(const ShortcutResult& r);

enum class Family { Church, Tower };
// Church: c_n; Tower: n-fold lambda wrapping of a base normal term.
TermPtr family_member(Family f, uint32_t n, const TermPtr& base = nullptr);

// Compares F[A'[nu := family(n)]] against F[A'[nu := family(m)]].
HEqual distinguish(const TermPtr& F, const std::string& x, const TermPtr& aprime,
                   const std::string& nu, Family fam, uint32_t n, uint32_t m, uint32_t depth,
                   const RuleSet& rules, const Fuel& fuel);

// Scope-lemma antecedent data: per explored level, compare (x U_k) under the
// two instantiations.
struct ScopeProbeRow {
  size_t k = 0;
  std::string verdict;
};
std::vector<ScopeProbeRow> scope_probe(const BranchData& branch, const std::string& x,
                                       const TermPtr& aprime, const std::string& nu,
                                       Family fam, uint32_t n, uint32_t m, uint32_t depth,
                                       const RuleSet& rules, const Fuel& fuel);

}  // namespace lamlab
