#include "lamlab/occurrence.hpp"

#include <algorithm>

namespace lamlab {

namespace {
bool is_path_prefix(const Path& a, const Path& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}
}  // namespace

std::vector<Occurrence> occurrences_of(const TermPtr& t, const std::string& x) {
  std::vector<Occurrence> out;
  size_t id = 0;
  for (Path& p : occurrence_paths(t, x)) out.push_back({id++, std::move(p)});
  return out;
}

std::vector<Path> arg_paths_of(const TermPtr& t, const Occurrence& occ) {
  if (!subterm_at(t, occ.path)->is(Kind::FreeVar))
    throw StaleOccurrenceError("occurrence path does not address a free variable");
  // climb while the occurrence is on the function side of an application
  std::vector<Path> out;
  Path cur = occ.path;
  while (!cur.empty() && cur.back() == Step::Fun) {
    cur.pop_back();
    Path arg = cur;
    arg.push_back(Step::Arg);
    out.push_back(std::move(arg));
  }
  return out;
}

std::vector<TermPtr> args_of(const TermPtr& t, const Occurrence& occ) {
  std::vector<TermPtr> out;
  for (const Path& p : arg_paths_of(t, occ)) out.push_back(subterm_at(t, p));
  return out;
}

std::vector<TermPtr> args_of_named(const TermPtr& t, const Occurrence& occ,
                                   NamingTable& names) {
  std::vector<TermPtr> out;
  for (const Path& p : arg_paths_of(t, occ)) out.push_back(open_to_named(t, p, names));
  return out;
}

bool is_pure(const TermPtr& t, const Occurrence& occ, const std::string& x) {
  for (const Occurrence& other : occurrences_of(t, x)) {
    if (other.path == occ.path) continue;
    for (const Path& argp : arg_paths_of(t, other)) {
      if (is_path_prefix(argp, occ.path)) return false;
    }
  }
  return true;
}

ResidualStep residuals(const TermPtr& t, const TraceStep& step, const std::string& x,
                       const RuleSet& rules) {
  ResidualStep rs;
  rs.before = t;
  rs.step = step;
  rs.after = apply_step(t, step.at, step.rule, rules);
  rs.before_occs = occurrences_of(t, x);
  rs.after_occs = occurrences_of(rs.after, x);
  StepGeometry g = step_geometry(t, step.at, step.rule, rules);
  std::map<std::string, size_t> after_by_path;
  for (const Occurrence& a : rs.after_occs) after_by_path[path_str(a.path)] = a.id;
  std::vector<int> claimed(rs.after_occs.size(), 0);
  for (const Occurrence& b : rs.before_occs) {
    std::vector<size_t>& img = rs.map[b.id];
    for (const Path& p : push_path(g, b.path)) {
      auto it = after_by_path.find(path_str(p));
      if (it == after_by_path.end())
        throw StaleOccurrenceError("residual path is not an occurrence of the variable");
      img.push_back(it->second);
      ++claimed[it->second];
    }
    std::sort(img.begin(), img.end());
  }
  // every after-occurrence is the residual of exactly one before-occurrence
  for (size_t i = 0; i < claimed.size(); ++i) {
    if (claimed[i] != 1)
      throw StaleOccurrenceError("after-occurrence is not the residual of exactly one ancestor");
  }
  return rs;
}

std::optional<std::pair<std::string, TermPtr>> step_substitution(const TermPtr& t,
                                                                 const TraceStep& step,
                                                                 const Path& occ,
                                                                 NamingTable& names) {
  if (step.rule != "beta") return std::nullopt;
  // occ inside the abstraction body of the redex?
  Path m_root = step.at;
  m_root.push_back(Step::Fun);
  TermPtr abs = subterm_at(t, m_root);
  m_root.push_back(Step::Body);
  if (!is_path_prefix(m_root, occ)) return std::nullopt;
  Path n_root = step.at;
  n_root.push_back(Step::Arg);
  const std::string& binder = names.name_for(abs->binder_id, abs->name);
  return std::make_pair(binder, open_to_named(t, n_root, names));
}

}  // namespace lamlab
