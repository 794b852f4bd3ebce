#include "lamlab/report.hpp"

#include <cstdio>
#include <fstream>

namespace lamlab {

Json trace_json(const ReductionTrace& tr) {
  Json steps = Json::array();
  for (const TraceStep& s : tr.steps) steps.push_back({{"at", path_str(s.at)}, {"rule", s.rule}});
  return {{"start", tr.start ? print_term(tr.start) : ""},
          {"end", tr.end ? print_term(tr.end) : ""},
          {"steps", steps}};
}

Json bohm_json(const BohmPrefix& p) {
  switch (p.tag) {
    case BohmPrefix::Tag::Bottom: return {{"leaf", "bottom-certified"}};
    case BohmPrefix::Tag::Unknown: return {{"leaf", "unknown-budget"}};
    case BohmPrefix::Tag::Cut: return {{"leaf", "cut-at-depth"}};
    case BohmPrefix::Tag::Node: break;
  }
  Json children = Json::array();
  for (const BohmPrefix& c : p.children) children.push_back(bohm_json(c));
  Json head;
  switch (p.head_kind) {
    case BohmPrefix::HeadKind::Bound: head = {{"bound", p.head_level}}; break;
    case BohmPrefix::HeadKind::Free: head = {{"free", p.head_name}}; break;
    case BohmPrefix::HeadKind::Const: head = {{"const", p.head_name}}; break;
  }
  return {{"binders", p.binders}, {"head", head}, {"children", children}};
}

Json level_json(const Level& lev) {
  Json occs = Json::array();
  for (const LevelOcc& o : lev.occs) {
    Json args = Json::array();
    for (const TermPtr& a : o.args_named) args.push_back(print_term(a));
    std::string good = o.good.v == GoodStatus::V::Good
                           ? "good"
                           : (o.good.v == GoodStatus::V::NotGood ? "not-good" : "unknown");
    Json jo = {{"id", o.id},     {"path", path_str(o.path)}, {"pure", true},
               {"args", args},   {"good", good}};
    if (!o.good.reason.empty()) jo["reason"] = o.good.reason;
    if (o.parent) jo["parent"] = *o.parent;
    occs.push_back(std::move(jo));
  }
  return {{"gk_power", lev.gk_power},
          {"term_size", lev.term->size},
          {"impure_occurrences", lev.impure_count},
          {"occurrences", occs}};
}

Json branch_json(const BranchData& b) {
  Json levels = Json::array();
  for (const BranchLevel& bl : b.levels) {
    Json u = Json::array(), s = Json::array(), v = Json::array();
    for (const auto& e : bl.U) u.push_back(print_term(e));
    for (const auto& e : bl.S) s.push_back(print_term(e));
    for (const auto& e : bl.V) v.push_back(print_term(e));
    Json sigma = Json::object();
    for (const auto& [var, img] : bl.sigma) sigma[var] = print_term(img);
    levels.push_back({{"occ", bl.occ_id},
                      {"U", u},
                      {"S", s},
                      {"V", v},
                      {"sigma", sigma},
                      {"t", bl.t_term ? print_term(bl.t_term) : ""},
                      {"t_binders", bl.t_binders},
                      {"t_head", bl.t_head_key}});
  }
  Json events = Json::array();
  for (const HeadEvent& e : b.events)
    events.push_back({{"run", e.run_k},
                      {"source_k", e.source_k},
                      {"source_idx", e.source_idx},
                      {"state", e.state_no}});
  return {{"levels", levels}, {"events", events}, {"rho_complete", b.rho_complete}};
}

std::string verdict_str(CaseReport::Verdict v) {
  switch (v) {
    case CaseReport::Verdict::Case1: return "Case1";
    case CaseReport::Verdict::Case2a: return "Case2a";
    case CaseReport::Verdict::Case2bSuspect: return "Case2bSuspect";
    case CaseReport::Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string stability_str(CaseReport::HeadStability s) {
  switch (s) {
    case CaseReport::HeadStability::StableBound: return "stable-bound";
    case CaseReport::HeadStability::StableFree: return "stable-free";
    case CaseReport::HeadStability::Unstable: return "unstable";
  }
  return "?";
}

Json case_report_json(const CaseReport& rep) {
  Json j = {{"verdict", verdict_str(rep.verdict)},
            {"head_stability", stability_str(rep.head_stability)},
            {"event_sources", rep.event_sources},
            {"levels_explored", rep.levels_explored}};
  if (rep.bound_l) j["bound_l"] = *rep.bound_l;
  return j;
}

Json analysis_json(const Tree& tree, const BranchData& b, const CaseReport& rep) {
  Json levels = Json::array();
  for (const Level& lev : tree.levels) levels.push_back(level_json(lev));
  return {{"x", tree.x},
          {"levels", levels},
          {"branch", branch_json(b)},
          {"report", case_report_json(rep)}};
}

Json persistence_json(const PersistenceVerdict& v) {
  Json j;
  switch (v.kind) {
    case PersistenceVerdict::Kind::ViolationApplied:
      j["verdict"] = "Violation";
      j["kind"] = "applied";
      j["witness"] = trace_json(v.witness);
      break;
    case PersistenceVerdict::Kind::ViolationErased:
      j["verdict"] = "Violation";
      j["kind"] = "erased";
      j["witness"] = trace_json(v.witness);
      break;
    case PersistenceVerdict::Kind::NoViolationFound: j["verdict"] = "NoViolationFound"; break;
  }
  j["explored"] = v.explored;
  j["max_depth"] = v.max_depth;
  j["steps_used"] = v.steps_used;
  if (v.scan_hits) j["scan_hits"] = v.scan_hits;
  return j;
}

std::string hequal_str(HEqual::Verdict v) {
  switch (v) {
    case HEqual::Verdict::Distinct: return "Distinct";
    case HEqual::Verdict::AgreeToDepth: return "AgreeToDepth";
    case HEqual::Verdict::Unknown: return "Unknown";
  }
  return "?";
}

void write_json_atomic(const std::string& path, const Json& j) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move report into place: " + path);
}

ShortcutResult normalizable_shortcut(const TermPtr& F, const std::string& x,
                                     const RuleSet& rules, const Fuel& fuel, uint32_t depth) {
  ShortcutResult res;
  ReduceResult r = reduce(F, Strategy::Leftmost, rules, fuel);
  if (r.status == ReduceResult::Status::NormalForm) {
    res.normal_form = r.trace.end;
    res.n = static_cast<uint32_t>(res.normal_form->size);
    res.kind = ShortcutResult::Kind::InfiniteRange;
    bool all_distinct = true;
    auto member = [&](uint32_t k) {
      TermPtr body = church(k);
      for (uint32_t i = 0; i < res.n; ++i) body = Term::lam(body, "x" + std::to_string(res.n - i));
      return body;
    };
    for (auto [a, b] : {std::pair<uint32_t, uint32_t>{0, 1}, {0, 2}, {1, 2}}) {
      HEqual h = h_equal_bounded(substitute(F, x, member(a)), substitute(F, x, member(b)),
                                 depth, rules, fuel);
      res.pair_verdicts.emplace_back(std::to_string(a) + "/" + std::to_string(b),
                                     hequal_str(h.verdict));
      if (h.verdict != HEqual::Verdict::Distinct) all_distinct = false;
    }
    if (!all_distinct) {
      res.kind = ShortcutResult::Kind::Unknown;
      res.note = "numeral instances were not pairwise distinct within the budget";
    }
    return res;
  }
  // not normalized within fuel: report iterate sizes as evidence
  TermPtr cur = F;
  res.gk_sizes.push_back(cur->size);
  bool grows = true;
  try {
    for (int i = 0; i < 6; ++i) {
      cur = gross_knuth(cur, rules);
      if (cur->size <= res.gk_sizes.back()) grows = false;
      res.gk_sizes.push_back(cur->size);
    }
  } catch (const TermSizeError&) {
    res.gk_sizes.push_back(max_term_size());
  }
  if (r.status == ReduceResult::Status::CycleCertified || grows) {
    res.kind = ShortcutResult::Kind::NotNormalizable;
    res.note = r.status == ReduceResult::Status::CycleCertified
                   ? "leftmost reduction cycles"
                   : "leftmost fuel exhausted and iterate sizes grow strictly";
  } else {
    res.kind = ShortcutResult::Kind::Unknown;
    res.note = "leftmost fuel exhausted without growth evidence";
  }
  return res;
}

Json shortcut_json(const ShortcutResult& r) {
  Json j;
  switch (r.kind) {
    case ShortcutResult::Kind::InfiniteRange: j["verdict"] = "InfiniteRange"; break;
    case ShortcutResult::Kind::NotNormalizable: j["verdict"] = "NotNormalizable"; break;
    case ShortcutResult::Kind::Unknown: j["verdict"] = "Unknown"; break;
  }
  if (r.normal_form) {
    j["normal_form"] = print_term(r.normal_form);
    j["n"] = r.n;
  }
  if (!r.pair_verdicts.empty()) {
    Json pv = Json::object();
    for (const auto& [k, v] : r.pair_verdicts) pv[k] = v;
    j["pairs"] = pv;
  }
  if (!r.gk_sizes.empty()) j["iterate_sizes"] = r.gk_sizes;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

TermPtr family_member(Family f, uint32_t n, const TermPtr& base) {
  if (f == Family::Church) return church(n);
  TermPtr t = base ? base : combinators().I;
  for (uint32_t i = 0; i < n; ++i) t = Term::lam(t, "t" + std::to_string(i));
  return t;
}

HEqual distinguish(const TermPtr& F, const std::string& x, const TermPtr& aprime,
                   const std::string& nu, Family fam, uint32_t n, uint32_t m, uint32_t depth,
                   const RuleSet& rules, const Fuel& fuel) {
  TermPtr an = substitute(aprime, nu, family_member(fam, n));
  TermPtr am = substitute(aprime, nu, family_member(fam, m));
  return h_equal_bounded(substitute(F, x, an), substitute(F, x, am), depth, rules, fuel);
}

std::vector<ScopeProbeRow> scope_probe(const BranchData& branch, const std::string& x,
                                       const TermPtr& aprime, const std::string& nu,
                                       Family fam, uint32_t n, uint32_t m, uint32_t depth,
                                       const RuleSet& rules, const Fuel& fuel) {
  std::vector<ScopeProbeRow> rows;
  TermPtr an = substitute(aprime, nu, family_member(fam, n));
  TermPtr am = substitute(aprime, nu, family_member(fam, m));
  for (size_t k = 0; k < branch.levels.size(); ++k) {
    auto inst = [&](const TermPtr& a) {
      std::vector<TermPtr> args;
      for (const TermPtr& e : branch.levels[k].U) args.push_back(substitute(e, x, a));
      return app_spine(a, args);
    };
    HEqual h = h_equal_bounded(inst(an), inst(am), depth, rules, fuel);
    rows.push_back({k, hequal_str(h.verdict)});
  }
  return rows;
}

}  // namespace lamlab
