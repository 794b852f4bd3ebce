#include "lamlab/branch.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace lamlab {

TermPtr fk(const TermPtr& F, uint32_t k, const RuleSet& rules) {
  return gk_iterate(F, k, rules);
}

GoodStatus good_check(const TermPtr& level_term, const Path& occ, const std::string& x,
                      const TermPtr& A, const RuleSet& rules, const Fuel& fuel) {
  GoodStatus st;
  bool unknown = false;
  // every enclosing subterm, from the occurrence itself up to the whole term
  for (size_t len = occ.size() + 1; len-- > 0;) {
    Path prefix(occ.begin(), occ.begin() + static_cast<long>(len));
    TermPtr sub = subterm_at(level_term, prefix);
    Solvability sv = solvability(substitute(sub, x, A), rules, fuel);
    if (sv.verdict == Solvability::Verdict::Unsolvable) {
      st.v = GoodStatus::V::NotGood;
      st.reason = "unsolvable enclosing subterm at " + path_str(prefix);
      return st;
    }
    if (sv.verdict == Solvability::Verdict::Unknown) unknown = true;
  }
  if (unknown) {
    st.v = GoodStatus::V::Unknown;
    st.reason = "solvability unknown within fuel for an enclosing subterm";
  } else {
    st.v = GoodStatus::V::Good;
  }
  return st;
}

namespace {

// Profile of the pure occurrences: sorted argument-list codes. Levels advance
// when this changes, so core unfolding that leaves the x-sites untouched does
// not create stuttering levels.
std::vector<std::string> level_profile(const TermPtr& t, const std::string& x,
                                       NamingTable& names) {
  std::vector<std::string> prof;
  for (const Occurrence& o : occurrences_of(t, x)) {
    if (!is_pure(t, o, x)) continue;
    std::string sig;
    for (const Path& p : arg_paths_of(t, o)) {
      sig += term_code(open_to_named(t, p, names));
      sig += '|';
    }
    prof.push_back(std::move(sig));
  }
  std::sort(prof.begin(), prof.end());
  return prof;
}

void fill_level_occs(Level& lev, const std::string& x, const TermPtr& A,
                     const RuleSet& rules, const Fuel& fuel, NamingTable& names) {
  size_t id = 0;
  for (const Occurrence& o : occurrences_of(lev.term, x)) {
    if (!is_pure(lev.term, o, x)) {
      ++lev.impure_count;
      continue;
    }
    LevelOcc lo;
    lo.id = id++;
    lo.path = o.path;
    lo.arg_paths = arg_paths_of(lev.term, o);
    lo.args_named = args_of_named(lev.term, o, names);
    lo.good = good_check(lev.term, o.path, x, A, rules, fuel);
    lev.occs.push_back(std::move(lo));
  }
}

// Push all x-occurrence paths of `from` through the steps, producing for each
// starting path the set of final paths.
std::vector<std::vector<Path>> push_occurrences(const TermPtr& from,
                                                const std::vector<TraceStep>& steps,
                                                const std::string& x, const RuleSet& rules) {
  std::vector<std::vector<Path>> sets;
  for (const Occurrence& o : occurrences_of(from, x)) sets.push_back({o.path});
  TermPtr cur = from;
  for (const TraceStep& s : steps) {
    StepGeometry g = step_geometry(cur, s.at, s.rule, rules);
    cur = apply_step(cur, s.at, s.rule, rules);
    for (auto& set : sets) {
      std::set<Path> pushed;
      for (const Path& p : set)
        for (Path& np : push_path(g, p)) pushed.insert(std::move(np));
      set.assign(pushed.begin(), pushed.end());
    }
  }
  return sets;
}

void resolve_parents(const Level& prev, Level& lev, const std::string& x,
                     const RuleSet& rules) {
  auto sets = push_occurrences(prev.term, lev.steps_from_prev, x, rules);
  // all occurrences of prev, in preorder; map pure ids to their rank
  std::vector<Occurrence> prev_all = occurrences_of(prev.term, x);
  std::map<std::string, size_t> pure_rank_by_path;
  for (const LevelOcc& o : prev.occs) pure_rank_by_path[path_str(o.path)] = o.id;
  for (LevelOcc& o : lev.occs) {
    std::optional<size_t> parent;
    for (size_t i = 0; i < prev_all.size(); ++i) {
      for (const Path& p : sets[i]) {
        if (p == o.path) {
          auto it = pure_rank_by_path.find(path_str(prev_all[i].path));
          if (it == pure_rank_by_path.end())
            throw NoGoodBranchError("pure occurrence descends from an impure one");
          if (parent && *parent != it->second)
            throw NoGoodBranchError("occurrence has two residual ancestors");
          parent = it->second;
        }
      }
    }
    if (!parent) throw NoGoodBranchError("pure occurrence without a residual ancestor");
    o.parent = parent;
  }
}

}  // namespace

Tree tree_levels(const TermPtr& F, const std::string& x, const TermPtr& A,
                 const AnalysisConfig& cfg, const RuleSet& rules) {
  Tree tree;
  tree.F = F;
  tree.A = A;
  tree.x = x;
  Level l0;
  l0.gk_power = 0;
  l0.term = F;
  fill_level_occs(l0, x, A, rules, cfg.fuel, tree.names);
  tree.levels.push_back(std::move(l0));

  for (uint32_t k = 0; k < cfg.levels; ++k) {
    const Level& prev = tree.levels.back();
    std::vector<std::string> base_profile = level_profile(prev.term, x, tree.names);
    Level next;
    next.term = prev.term;
    next.gk_power = prev.gk_power;
    // advance to the next iterate whose occurrence profile changed; when the
    // budget runs out the last iterate still forms a (stuttering) level
    try {
      for (uint32_t round = 0; round < cfg.level_gk_budget; ++round) {
        auto marks = redexes(next.term, rules);
        if (marks.empty()) break;  // normal form: levels stutter from here on
        DevelopResult d = develop(next.term, marks, rules);
        next.term = d.term;
        next.gk_power += 1;
        next.steps_from_prev.insert(next.steps_from_prev.end(), d.steps.begin(),
                                    d.steps.end());
        if (next.term->size > cfg.fuel.max_size) throw TermSizeError(next.term->size);
        if (level_profile(next.term, x, tree.names) != base_profile) break;
      }
    } catch (const TermSizeError&) {
      tree.truncated = true;
      break;
    }
    fill_level_occs(next, x, A, rules, cfg.fuel, tree.names);
    resolve_parents(prev, next, x, rules);
    tree.levels.push_back(std::move(next));
  }
  return tree;
}

namespace {

struct BranchDfs {
  const Tree& tree;
  // children[k]: parent id -> occ ids at level k (k >= 1)
  std::vector<std::map<size_t, std::vector<size_t>>> children;

  explicit BranchDfs(const Tree& t) : tree(t) {
    children.resize(tree.levels.size());
    for (size_t k = 1; k < tree.levels.size(); ++k)
      for (const LevelOcc& o : tree.levels[k].occs)
        children[k][*o.parent].push_back(o.id);
  }

  bool rec(size_t k, size_t id, std::vector<size_t>& chain) {
    const LevelOcc& o = tree.levels[k].occs[id];
    if (o.good.v != GoodStatus::V::Good) return false;
    chain.push_back(id);
    if (k + 1 == tree.levels.size()) return true;
    auto it = children[k + 1].find(id);
    if (it != children[k + 1].end()) {
      for (size_t child : it->second)
        if (rec(k + 1, child, chain)) return true;
    }
    chain.pop_back();
    return false;
  }
};

std::string head_key(const HeadOutcome& ho) {
  if (!ho.head) return "?";
  switch (ho.head->kind) {
    case Kind::BoundVar: {
      if (ho.head->index < ho.binders) {
        uint32_t level = ho.binders - 1 - ho.head->index;
        return "bound:" + std::to_string(level);
      }
      return "free:_up" + std::to_string(ho.head->index - ho.binders);
    }
    case Kind::FreeVar: return "free:" + ho.head->name;
    case Kind::Const: return "const:" + ho.head->name;
    default: return "?";
  }
}

std::string head_display(const HeadOutcome& ho) {
  if (!ho.head) return "?";
  if (ho.head->is(Kind::BoundVar)) return ho.head->name.empty() ? "z" : ho.head->name;
  return ho.head->name;
}

}  // namespace

BranchData find_good_branch(Tree& tree, const AnalysisConfig& cfg, const RuleSet& rules) {
  BranchDfs dfs(tree);
  std::vector<size_t> chain;
  bool found = false;
  for (const LevelOcc& root : tree.levels[0].occs) {
    if (dfs.rec(0, root.id, chain)) {
      found = true;
      break;
    }
  }
  if (!found)
    throw NoGoodBranchError("no good branch to depth " +
                            std::to_string(tree.levels.size() - 1) + " within budget");

  BranchData branch;
  branch.levels.resize(chain.size());
  // arguments per level
  for (size_t k = 0; k < chain.size(); ++k) {
    branch.levels[k].occ_id = chain[k];
    branch.levels[k].U = tree.levels[k].occs[chain[k]].args_named;
  }
  // gap data: sigma_k, R_k, S_k via the residual chain through the gap steps
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    const Level& from = tree.levels[k];
    const Level& to = tree.levels[k + 1];
    const Path& start = from.occs[chain[k]].path;
    const Path& target = to.occs[chain[k + 1]].path;
    // forward walk with predecessor tracking
    std::vector<std::map<std::string, Path>> preds(to.steps_from_prev.size());
    std::set<Path> cur_set{start};
    TermPtr cur = from.term;
    std::vector<TermPtr> stages{cur};
    for (size_t i = 0; i < to.steps_from_prev.size(); ++i) {
      const TraceStep& s = to.steps_from_prev[i];
      StepGeometry g = step_geometry(cur, s.at, s.rule, rules);
      std::set<Path> next_set;
      for (const Path& p : cur_set) {
        for (Path& np : push_path(g, p)) {
          preds[i].emplace(path_str(np), p);
          next_set.insert(std::move(np));
        }
      }
      cur = apply_step(cur, s.at, s.rule, rules);
      stages.push_back(cur);
      cur_set = std::move(next_set);
    }
    // backtrack the chain of positions
    std::vector<Path> pos_chain(to.steps_from_prev.size() + 1);
    pos_chain.back() = target;
    for (size_t i = to.steps_from_prev.size(); i-- > 0;) {
      auto it = preds[i].find(path_str(pos_chain[i + 1]));
      if (it == preds[i].end())
        throw NoGoodBranchError("branch residual chain broke during backtracking");
      pos_chain[i] = it->second;
    }
    // accumulate the gap substitution along the chain
    SubstMap sigma;
    for (size_t i = 0; i < to.steps_from_prev.size(); ++i) {
      auto sub = step_substitution(stages[i], to.steps_from_prev[i], pos_chain[i], tree.names);
      if (!sub) continue;
      for (auto& [v, img] : sigma) img = substitute(img, sub->first, sub->second);
      sigma.emplace(sub->first, sub->second);
    }
    const auto& u_next = branch.levels[k + 1].U;
    size_t lg_u = branch.levels[k].U.size();
    if (u_next.size() < lg_u)
      throw NoGoodBranchError("argument list shrank along the chosen branch");
    branch.levels[k].R.assign(u_next.begin(), u_next.begin() + static_cast<long>(lg_u));
    branch.levels[k].S.assign(u_next.begin() + static_cast<long>(lg_u), u_next.end());
    branch.levels[k].sigma = std::move(sigma);
  }
  // V recurrence with element origins
  branch.levels[0].V = branch.levels[0].U;
  branch.levels[0].v_origin.assign(branch.levels[0].V.size(), {SIZE_MAX, 0});
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    const BranchLevel& cur = branch.levels[k];
    BranchLevel& nxt = branch.levels[k + 1];
    for (size_t i = 0; i < cur.V.size(); ++i) {
      nxt.V.push_back(apply_subst(cur.V[i], cur.sigma));
      nxt.v_origin.push_back(cur.v_origin[i]);
    }
    for (size_t i = 0; i < cur.S.size(); ++i) {
      nxt.V.push_back(cur.S[i]);
      nxt.v_origin.push_back({k, i});
    }
  }
  // rho recurrence: t_0 from (A V_0[A]); t_{k+1} from (sigma_k(t_k) S_k[A])
  const TermPtr& A = tree.A;
  auto subst_x = [&](const std::vector<TermPtr>& v) {
    std::vector<TermPtr> out;
    out.reserve(v.size());
    for (const TermPtr& e : v) out.push_back(substitute(e, tree.x, A));
    return out;
  };
  for (size_t k = 0; k < chain.size(); ++k) {
    BranchLevel& bl = branch.levels[k];
    TermPtr base;
    if (k == 0) {
      base = app_spine(A, subst_x(bl.V));
    } else {
      const BranchLevel& prev = branch.levels[k - 1];
      if (!prev.t_term) {
        branch.rho_complete = false;
        break;
      }
      base = app_spine(apply_subst(prev.t_term, prev.sigma), subst_x(prev.S));
    }
    HeadOutcome ho = head_reduce(base, rules, cfg.fuel);
    bl.t_kind = ho.kind;
    if (ho.kind != HeadOutcome::Kind::Hnf) {
      branch.rho_complete = false;
      bl.t_term = ho.hnf;
      break;
    }
    bl.t_term = ho.hnf;
    bl.t_binders = ho.binders;
    bl.t_head_key = head_key(ho);
    bl.t_head_name = head_display(ho);
    if (ho.head->is(Kind::FreeVar)) bl.head_in_sigma_dom = bl.sigma.count(ho.head->name) > 0;
  }
  // the raw gap substitution also names binders that none of the recorded
  // data mentions; keep only the part acting on U_k, V_k and t_k
  for (BranchLevel& bl : branch.levels) {
    std::set<std::string> relevant;
    auto add_names = [&](const TermPtr& t) {
      if (!t) return;
      for (const std::string& n : free_names(t)) relevant.insert(n);
    };
    for (const TermPtr& e : bl.U) add_names(e);
    for (const TermPtr& e : bl.V) add_names(e);
    add_names(bl.t_term);
    for (auto it = bl.sigma.begin(); it != bl.sigma.end();) {
      if (!relevant.count(it->first))
        it = bl.sigma.erase(it);
      else
        ++it;
    }
  }
  return branch;
}

void compute_head_events(BranchData& branch, const TermPtr& A, const std::string& x,
                         const AnalysisConfig& cfg, const RuleSet& rules) {
  branch.events.clear();
  for (size_t run = 1; run < branch.levels.size(); ++run) {
    const BranchLevel& bl = branch.levels[run];
    std::vector<TermPtr> args;
    args.reserve(bl.V.size());
    for (const TermPtr& e : bl.V) args.push_back(substitute(e, x, A));
    TermPtr term = app_spine(A, args);
    HeadEventHook hook;
    std::vector<std::pair<size_t, size_t>> mark_src;
    for (size_t j = 0; j < bl.V.size(); ++j) {
      if (bl.v_origin[j].first == SIZE_MAX) continue;  // from V_0, not an S element
      hook.marked.push_back(spine_arg_path({}, args.size(), j));
      mark_src.push_back(bl.v_origin[j]);
    }
    if (hook.marked.empty()) continue;
    hook.on_head = [&](size_t i, uint64_t state_no) {
      branch.events.push_back({static_cast<uint32_t>(run), mark_src[i].first,
                               mark_src[i].second, state_no});
    };
    head_reduce(term, rules, cfg.fuel, nullptr, &hook);
  }
}

CaseReport classify(const BranchData& branch, const AnalysisConfig& cfg) {
  CaseReport rep;
  rep.levels_explored = static_cast<uint32_t>(branch.levels.size()) - 1;
  // head stability
  size_t dom_hits = 0;
  for (const BranchLevel& bl : branch.levels)
    if (bl.head_in_sigma_dom) ++dom_hits;
  if (dom_hits >= cfg.unstable_threshold) {
    rep.head_stability = CaseReport::HeadStability::Unstable;
  } else {
    size_t w = std::min<size_t>(cfg.stability_window, branch.levels.size());
    bool stable = true;
    const std::string& last = branch.levels.back().t_head_key;
    for (size_t i = branch.levels.size() - w; i < branch.levels.size(); ++i)
      if (branch.levels[i].t_head_key != last) stable = false;
    if (!stable || last.empty() || last == "?") {
      rep.head_stability = CaseReport::HeadStability::Unstable;
    } else if (last.rfind("bound:", 0) == 0) {
      rep.head_stability = CaseReport::HeadStability::StableBound;
    } else {
      rep.head_stability = CaseReport::HeadStability::StableFree;
    }
  }
  // distinct S_k sources with events
  std::set<size_t> sources;
  for (const HeadEvent& e : branch.events) sources.insert(e.source_k);
  rep.event_sources = sources.size();

  if (!branch.rho_complete) {
    rep.verdict = CaseReport::Verdict::Inconclusive;
    return rep;
  }
  // bounded argument lists?
  uint32_t lstar = static_cast<uint32_t>(branch.levels.back().U.size());
  size_t k0 = branch.levels.size();
  while (k0 > 0 && branch.levels[k0 - 1].U.size() == lstar) --k0;
  if (branch.levels.size() - k0 > cfg.stability_window) {
    rep.verdict = CaseReport::Verdict::Case1;
    rep.bound_l = lstar;
    return rep;
  }
  rep.verdict = rep.event_sources >= cfg.event_threshold
                    ? CaseReport::Verdict::Case2a
                    : CaseReport::Verdict::Case2bSuspect;
  return rep;
}

}  // namespace lamlab
