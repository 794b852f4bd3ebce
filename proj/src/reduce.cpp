#include "lamlab/reduce.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace lamlab {

namespace {

bool is_prefix(const Path& a, const Path& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

bool path_less(const Path& a, const Path& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](Step x, Step y) {
                                        return static_cast<uint8_t>(x) < static_cast<uint8_t>(y);
                                      });
}

// Spine of the node: number of args and the head, walking Fun edges.
struct NodeSpine {
  TermPtr head;
  size_t n_args;
};
NodeSpine node_spine(const TermPtr& t) {
  TermPtr cur = t;
  size_t n = 0;
  while (cur->is(Kind::App)) {
    ++n;
    cur = cur->fun();
  }
  return {cur, n};
}

// Is the node at `t` a constant redex (exactly arity args, fireable)?
const Rule* const_redex_rule(const TermPtr& t, const RuleSet& rules, std::string* name_out) {
  NodeSpine s = node_spine(t);
  if (!s.head->is(Kind::Const)) return nullptr;
  const Rule* r = rules.find(s.head->name);
  if (!r) return nullptr;
  if (s.n_args != r->arity) return nullptr;
  if (!r->body && !r->overrun_error) return nullptr;  // inert
  if (name_out) *name_out = s.head->name;
  return r;
}

std::vector<TermPtr> spine_args_of_node(const TermPtr& t, size_t n) {
  std::vector<TermPtr> args(n);
  TermPtr cur = t;
  for (size_t i = n; i-- > 0;) {
    args[i] = cur->arg();
    cur = cur->fun();
  }
  return args;
}

void redexes_rec(const TermPtr& t, const RuleSet& rules, Path& cur, std::vector<Redex>& out) {
  if (t->is(Kind::App)) {
    if (t->fun()->is(Kind::Abs)) {
      out.push_back({cur, "beta"});
    } else {
      std::string cname;
      if (const_redex_rule(t, rules, &cname)) out.push_back({cur, "const:" + cname});
    }
    cur.push_back(Step::Fun);
    redexes_rec(t->fun(), rules, cur, out);
    cur.back() = Step::Arg;
    redexes_rec(t->arg(), rules, cur, out);
    cur.pop_back();
  } else if (t->is(Kind::Abs)) {
    cur.push_back(Step::Body);
    redexes_rec(t->body(), rules, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Redex> redexes(const TermPtr& t, const RuleSet& rules) {
  std::vector<Redex> out;
  Path cur;
  redexes_rec(t, rules, cur, out);
  return out;
}

TermPtr apply_step(const TermPtr& t, const Path& at, const std::string& rule,
                   const RuleSet& rules) {
  TermPtr node = subterm_at(t, at);
  if (rule == "omega") {
    return replace_at(t, at, combinators().Omega);
  }
  if (rule == "beta") {
    if (!node->is(Kind::App) || !node->fun()->is(Kind::Abs))
      throw InvalidPathError("path does not address a beta-redex");
    return replace_at(t, at, beta_open(node->fun()->body(), node->arg()));
  }
  if (rule.rfind("const:", 0) == 0) {
    std::string cname;
    const Rule* r = const_redex_rule(node, rules, &cname);
    if (!r || cname != rule.substr(6))
      throw InvalidPathError("path does not address a redex of " + rule);
    if (!r->body && r->overrun_error) throw RuleOverrunError(cname);
    auto fired = rules.fire(cname, spine_args_of_node(node, r->arity));
    if (!fired) throw InvalidPathError("constant " + cname + " did not fire");
    return replace_at(t, at, *fired);
  }
  throw InvalidPathError("unknown rule " + rule);
}

// Residual geometry ---------------------------------------------------------

namespace {
void bound_positions(const TermPtr& t, uint32_t depth, Path& cur, std::vector<Path>& out) {
  switch (t->kind) {
    case Kind::BoundVar:
      if (t->index == depth) out.push_back(cur);
      break;
    case Kind::Abs:
      cur.push_back(Step::Body);
      bound_positions(t->body(), depth + 1, cur, out);
      cur.pop_back();
      break;
    case Kind::App:
      cur.push_back(Step::Fun);
      bound_positions(t->fun(), depth, cur, out);
      cur.back() = Step::Arg;
      bound_positions(t->arg(), depth, cur, out);
      cur.pop_back();
      break;
    default: break;
  }
}
}  // namespace

StepGeometry step_geometry(const TermPtr& t, const Path& at, const std::string& rule,
                           const RuleSet& rules) {
  StepGeometry g;
  g.at = at;
  TermPtr node = subterm_at(t, at);
  if (rule == "omega") {
    g.is_omega = true;
    return g;
  }
  if (rule == "beta") {
    g.is_beta = true;
    g.n_args = 1;
    Path cur;
    std::vector<Path> vars;
    bound_positions(node->fun()->body(), 0, cur, vars);
    g.insert_positions.push_back(std::move(vars));
    return g;
  }
  std::string cname;
  const Rule* r = const_redex_rule(node, rules, &cname);
  if (!r) throw InvalidPathError("no constant redex at path for geometry");
  g.n_args = r->arity;
  g.insert_positions.resize(r->arity);
  if (r->body) {
    // param j (left to right) has de Bruijn index depth + arity - 1 - j
    struct Walk {
      uint32_t arity;
      std::vector<std::vector<Path>>* out;
      void rec(const TermPtr& u, uint32_t depth, Path& cur) {
        switch (u->kind) {
          case Kind::BoundVar:
            if (u->index >= depth && u->index - depth < arity) {
              uint32_t j = arity - 1 - (u->index - depth);
              (*out)[j].push_back(cur);
            }
            break;
          case Kind::Abs:
            cur.push_back(Step::Body);
            rec(u->body(), depth + 1, cur);
            cur.pop_back();
            break;
          case Kind::App:
            cur.push_back(Step::Fun);
            rec(u->fun(), depth, cur);
            cur.back() = Step::Arg;
            rec(u->arg(), depth, cur);
            cur.pop_back();
            break;
          default: break;
        }
      }
    } w{r->arity, &g.insert_positions};
    Path cur;
    w.rec(r->body, 0, cur);
  }
  return g;
}

std::vector<Path> push_path(const StepGeometry& g, const Path& q) {
  if (!is_prefix(g.at, q)) return {q};
  Path r(q.begin() + static_cast<long>(g.at.size()), q.end());
  if (g.is_omega) return {};
  if (r.empty()) return {};
  std::vector<Path> out;
  if (g.is_beta) {
    if (r[0] == Step::Fun) {
      if (r.size() == 1) return {};
      if (r[1] != Step::Body) return {};
      Path rest(r.begin() + 2, r.end());
      // replaced variable leaves have no residual
      for (const Path& o : g.insert_positions[0])
        if (o == rest) return {};
      Path res = g.at;
      res.insert(res.end(), rest.begin(), rest.end());
      return {res};
    }
    // inside the argument
    Path rest(r.begin() + 1, r.end());
    for (const Path& o : g.insert_positions[0]) {
      Path res = g.at;
      res.insert(res.end(), o.begin(), o.end());
      res.insert(res.end(), rest.begin(), rest.end());
      out.push_back(std::move(res));
    }
    return out;
  }
  // constant rule: arg j root = Fun^(arity-1-j) ++ [Arg]
  size_t i = 0;
  while (i < r.size() && r[i] == Step::Fun) ++i;
  if (i >= r.size() || r[i] != Step::Arg || i > g.n_args - 1) return {};
  size_t j = g.n_args - 1 - i;
  Path rest(r.begin() + static_cast<long>(i) + 1, r.end());
  for (const Path& o : g.insert_positions[j]) {
    Path res = g.at;
    res.insert(res.end(), o.begin(), o.end());
    res.insert(res.end(), rest.begin(), rest.end());
    out.push_back(std::move(res));
  }
  return out;
}

// Developments --------------------------------------------------------------

DevelopResult develop(const TermPtr& t, std::vector<Redex> marks, const RuleSet& rules,
                      std::vector<std::vector<Path>> tracked) {
  DevelopResult res;
  res.term = t;
  res.tracked = std::move(tracked);
  while (!marks.empty()) {
    // innermost mark: longest path (nothing marked strictly inside it)
    size_t best = 0;
    for (size_t i = 1; i < marks.size(); ++i) {
      if (marks[i].at.size() > marks[best].at.size() ||
          (marks[i].at.size() == marks[best].at.size() &&
           path_less(marks[i].at, marks[best].at))) {
        best = i;
      }
    }
    Redex r = marks[best];
    marks.erase(marks.begin() + static_cast<long>(best));
    StepGeometry g = step_geometry(res.term, r.at, r.rule, rules);
    res.term = apply_step(res.term, r.at, r.rule, rules);
    res.steps.push_back({r.at, r.rule});
    // remaining marks are disjoint from or enclose r: paths are unchanged,
    // but push them through anyway to stay honest.
    std::vector<Redex> next;
    next.reserve(marks.size());
    for (const Redex& m : marks) {
      for (const Path& p : push_path(g, m.at)) next.push_back({p, m.rule});
    }
    marks = std::move(next);
    for (auto& set : res.tracked) {
      std::set<Path> pushed;
      for (const Path& p : set)
        for (Path& np : push_path(g, p)) pushed.insert(std::move(np));
      set.assign(pushed.begin(), pushed.end());
    }
  }
  return res;
}

TermPtr gross_knuth(const TermPtr& t, const RuleSet& rules) {
  return develop(t, redexes(t, rules), rules).term;
}

TermPtr gk_iterate(const TermPtr& t, uint32_t k, const RuleSet& rules) {
  TermPtr cur = t;
  for (uint32_t i = 0; i < k; ++i) cur = gross_knuth(cur, rules);
  return cur;
}

// Head reduction ------------------------------------------------------------

std::optional<Redex> head_redex(const TermPtr& t, const RuleSet& rules) {
  Path p;
  TermPtr cur = t;
  while (cur->is(Kind::Abs)) {
    p.push_back(Step::Body);
    cur = cur->body();
  }
  NodeSpine s = node_spine(cur);
  if (s.n_args == 0) return std::nullopt;
  if (s.head->is(Kind::Abs)) {
    // redex = application of the head to its first argument
    Path rp = p;
    for (size_t i = 0; i + 1 < s.n_args; ++i) rp.push_back(Step::Fun);
    return Redex{rp, "beta"};
  }
  if (s.head->is(Kind::Const)) {
    const Rule* r = rules.find(s.head->name);
    if (r && r->arity <= s.n_args && (r->body || r->overrun_error)) {
      Path rp = p;
      for (size_t i = 0; i < s.n_args - r->arity; ++i) rp.push_back(Step::Fun);
      return Redex{rp, "const:" + s.head->name};
    }
  }
  return std::nullopt;
}

namespace {

struct HeadState {
  uint32_t binders;
  TermPtr stripped;  // under the binders
  std::vector<TermPtr> spine_args;
  TermPtr head;
};

HeadState head_state(const TermPtr& t) {
  HeadState st;
  st.binders = 0;
  TermPtr cur = t;
  while (cur->is(Kind::Abs)) {
    ++st.binders;
    cur = cur->body();
  }
  st.stripped = cur;
  Spine sp = spine_of(cur);
  st.head = sp.head;
  st.spine_args = std::move(sp.args);
  return st;
}

// Is `p` on the head path (binders then spine functions)?
bool on_head_path(const Path& p, uint32_t binders, size_t n_args) {
  if (p.size() > binders + n_args) return false;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i < binders) {
      if (p[i] != Step::Body) return false;
    } else {
      if (p[i] != Step::Fun) return false;
    }
  }
  return true;
}

}  // namespace

HeadOutcome head_reduce(TermPtr t, const RuleSet& rules, const Fuel& fuel,
                        ReductionTrace* trace, HeadEventHook* hook) {
  HeadOutcome out;
  out.steps_used = 0;
  if (trace) {
    trace->start = t;
    trace->steps.clear();
  }
  std::vector<std::vector<Path>> marks;
  std::vector<bool> fired;
  if (hook) {
    for (const Path& p : hook->marked) marks.push_back({p});
    fired.assign(marks.size(), false);
  }
  // code of stripped body -> (state index, binder count)
  std::unordered_map<std::string, std::pair<uint64_t, uint32_t>> history;
  uint64_t state_no = 0;
  while (true) {
    HeadState st = head_state(t);
    if (hook) {
      for (size_t i = 0; i < marks.size(); ++i) {
        if (fired[i]) continue;
        for (const Path& p : marks[i]) {
          if (on_head_path(p, st.binders, st.spine_args.size())) {
            fired[i] = true;
            if (hook->on_head) hook->on_head(i, state_no);
            break;
          }
        }
      }
    }
    // cycle detection: some earlier whole state is a spine prefix of this one
    for (size_t r = 0; r <= st.spine_args.size(); ++r) {
      TermPtr prefix =
          r == 0 ? st.stripped
                 : app_spine(st.head, std::vector<TermPtr>(st.spine_args.begin(),
                                                           st.spine_args.end() - static_cast<long>(r)));
      auto it = history.find(term_code(prefix));
      if (it != history.end() && it->second.second == st.binders) {
        out.kind = HeadOutcome::Kind::CycleCertified;
        out.period = state_no - it->second.first;
        out.hnf = t;
        if (trace) trace->end = t;
        return out;
      }
    }
    history.emplace(term_code(st.stripped), std::make_pair(state_no, st.binders));

    auto hr = head_redex(t, rules);
    if (!hr) {
      out.kind = HeadOutcome::Kind::Hnf;
      out.hnf = t;
      out.binders = st.binders;
      out.head = st.head;
      out.args = st.spine_args;
      if (trace) trace->end = t;
      return out;
    }
    if (out.steps_used >= fuel.max_steps || t->size > fuel.max_size) {
      out.kind = HeadOutcome::Kind::FuelExhausted;
      out.hnf = t;
      if (trace) trace->end = t;
      return out;
    }
    StepGeometry g;
    if (hook) g = step_geometry(t, hr->at, hr->rule, rules);
    t = apply_step(t, hr->at, hr->rule, rules);
    ++out.steps_used;
    ++state_no;
    if (trace) trace->steps.push_back({hr->at, hr->rule});
    if (hook) {
      for (size_t i = 0; i < marks.size(); ++i) {
        if (fired[i]) continue;
        std::set<Path> pushed;
        for (const Path& p : marks[i])
          for (Path& np : push_path(g, p)) pushed.insert(std::move(np));
        marks[i].assign(pushed.begin(), pushed.end());
      }
    }
  }
}

// Strategies ----------------------------------------------------------------

ReduceResult reduce(const TermPtr& t, Strategy strategy, const RuleSet& rules,
                    const Fuel& fuel) {
  ReduceResult res;
  res.trace.start = t;
  if (strategy == Strategy::Head) {
    ReductionTrace tr;
    HeadOutcome ho = head_reduce(t, rules, fuel, &tr);
    res.trace = tr;
    res.period = ho.period;
    switch (ho.kind) {
      case HeadOutcome::Kind::Hnf: res.status = ReduceResult::Status::Hnf; break;
      case HeadOutcome::Kind::CycleCertified:
        res.status = ReduceResult::Status::CycleCertified;
        break;
      case HeadOutcome::Kind::FuelExhausted:
        res.status = ReduceResult::Status::FuelExhausted;
        break;
    }
    return res;
  }
  TermPtr cur = t;
  std::unordered_map<std::string, uint64_t> seen;
  uint64_t steps = 0;
  while (true) {
    auto it = seen.find(term_code(cur));
    if (it != seen.end()) {
      res.status = ReduceResult::Status::CycleCertified;
      res.period = steps - it->second;
      res.trace.end = cur;
      return res;
    }
    seen.emplace(term_code(cur), steps);
    auto rs = redexes(cur, rules);
    if (rs.empty()) {
      res.status = ReduceResult::Status::NormalForm;
      res.trace.end = cur;
      return res;
    }
    if (steps >= fuel.max_steps || cur->size > fuel.max_size) {
      res.status = ReduceResult::Status::FuelExhausted;
      res.trace.end = cur;
      return res;
    }
    cur = apply_step(cur, rs[0].at, rs[0].rule, rules);
    res.trace.steps.push_back({rs[0].at, rs[0].rule});
    ++steps;
  }
}

// Solvability / Omega-collapse ----------------------------------------------

Solvability solvability(const TermPtr& t, const RuleSet& rules, const Fuel& fuel) {
  Solvability s;
  s.outcome = head_reduce(t, rules, fuel);
  switch (s.outcome.kind) {
    case HeadOutcome::Kind::Hnf: s.verdict = Solvability::Verdict::Solvable; break;
    case HeadOutcome::Kind::CycleCertified:
      s.verdict = Solvability::Verdict::Unsolvable;
      break;
    case HeadOutcome::Kind::FuelExhausted: s.verdict = Solvability::Verdict::Unknown; break;
  }
  return s;
}

namespace {
struct CollapseCtx {
  const RuleSet& rules;
  const Fuel& fuel;
  std::unordered_map<std::string, Solvability::Verdict> memo;
  std::vector<Path>* unknowns;

  Solvability::Verdict check(const TermPtr& t) {
    std::string c = term_code(t);
    auto it = memo.find(c);
    if (it != memo.end()) return it->second;
    Solvability::Verdict v = solvability(t, rules, fuel).verdict;
    memo.emplace(std::move(c), v);
    return v;
  }

  TermPtr rec(const TermPtr& t, Path& cur) {
    Solvability::Verdict v = check(t);
    if (v == Solvability::Verdict::Unsolvable) return combinators().Omega;
    if (v == Solvability::Verdict::Unknown) unknowns->push_back(cur);
    switch (t->kind) {
      case Kind::Abs: {
        cur.push_back(Step::Body);
        TermPtr b = rec(t->body(), cur);
        cur.pop_back();
        return b.get() == t->body().get() ? t : Term::lam_keep(b, t->binder_id, t->name);
      }
      case Kind::App: {
        cur.push_back(Step::Fun);
        TermPtr f = rec(t->fun(), cur);
        cur.back() = Step::Arg;
        TermPtr a = rec(t->arg(), cur);
        cur.pop_back();
        return (f.get() == t->fun().get() && a.get() == t->arg().get()) ? t : Term::app(f, a);
      }
      default: return t;
    }
  }
};
}  // namespace

CollapseResult omega_collapse(const TermPtr& t, const RuleSet& rules, const Fuel& fuel) {
  CollapseResult res;
  CollapseCtx ctx{rules, fuel, {}, &res.unknown_subterms};
  Path cur;
  res.term = ctx.rec(t, cur);
  return res;
}

// Bounded join search ---------------------------------------------------------

std::optional<TermPtr> joinable(const TermPtr& t1, const TermPtr& t2, const RuleSet& rules,
                                const JoinBudget& budget) {
  if (alpha_eq(t1, t2)) return t1;
  std::unordered_map<std::string, TermPtr> seen1, seen2;
  auto add = [](std::unordered_map<std::string, TermPtr>& side, const TermPtr& t) {
    return side.emplace(term_code(t), t).second;
  };
  add(seen1, t1);
  add(seen2, t2);
  auto meet_of = [&](const TermPtr& t, bool into1) -> std::optional<TermPtr> {
    const auto& other = into1 ? seen2 : seen1;
    auto it = other.find(term_code(t));
    if (it != other.end()) return it->second;
    return std::nullopt;
  };
  // phase 1: Gross-Knuth ladders
  TermPtr g1 = t1, g2 = t2;
  for (uint32_t i = 0; i < budget.gk_rounds; ++i) {
    bool progressed = false;
    for (bool side1 : {true, false}) {
      TermPtr& g = side1 ? g1 : g2;
      if (redexes(g, rules).empty()) continue;
      try {
        TermPtr n = gross_knuth(g, rules);
        if (n->size > budget.fuel.max_size) continue;
        g = n;
      } catch (const TermSizeError&) {
        continue;
      }
      progressed = true;
      if (auto m = meet_of(g, side1)) return m;
      add(side1 ? seen1 : seen2, g);
    }
    if (!progressed) break;
  }
  // phase 2: mixed BFS (leftmost step and Gross-Knuth step per node)
  std::deque<std::pair<TermPtr, bool>> q;  // (term, is side 1)
  q.emplace_back(t1, true);
  q.emplace_back(t2, false);
  uint32_t expanded = 0;
  while (!q.empty() && expanded < budget.bfs_nodes) {
    auto [cur, side1] = q.front();
    q.pop_front();
    ++expanded;
    auto rs = redexes(cur, rules);
    std::vector<TermPtr> succs;
    if (!rs.empty()) {
      try {
        succs.push_back(apply_step(cur, rs[0].at, rs[0].rule, rules));
      } catch (const TermSizeError&) {
      }
      try {
        succs.push_back(gross_knuth(cur, rules));
      } catch (const TermSizeError&) {
      }
    }
    for (const TermPtr& n : succs) {
      if (n->size > budget.fuel.max_size) continue;
      if (auto m = meet_of(n, side1)) return m;
      if (add(side1 ? seen1 : seen2, n)) q.emplace_back(n, side1);
    }
  }
  return std::nullopt;
}

// Constructive cofinality join ------------------------------------------------

namespace {

struct FuelOut {};

void spend(uint64_t& budget, size_t n) {
  if (budget < n) throw FuelOut{};
  budget -= n;
}

std::vector<Redex> push_redexes(const StepGeometry& g, const std::vector<Redex>& rs) {
  std::vector<Redex> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const Redex& r : rs) {
    for (const Path& p : push_path(g, r.at)) {
      if (seen.emplace(path_str(p), r.rule).second) out.push_back({p, r.rule});
    }
  }
  return out;
}

std::vector<Redex> tracked_to_redexes(const std::vector<Redex>& sources,
                                      const std::vector<std::vector<Path>>& tracked) {
  std::vector<Redex> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (size_t i = 0; i < sources.size(); ++i) {
    for (const Path& p : tracked[i]) {
      if (seen.emplace(path_str(p), sources[i].rule).second) out.push_back({p, sources[i].rule});
    }
  }
  return out;
}

// Steps from the end of `steps[from..]` (applied to t) to gk^{n}(t), n being
// the number of remaining steps.
std::vector<TraceStep> cofinal_steps(const TermPtr& t, const std::vector<TraceStep>& steps,
                                     size_t from, const RuleSet& rules, uint64_t& budget) {
  size_t n = steps.size() - from;
  if (n == 0) return {};
  StepGeometry g0 = step_geometry(t, steps[from].at, steps[from].rule, rules);
  TermPtr u1 = apply_step(t, steps[from].at, steps[from].rule, rules);
  spend(budget, 1);
  std::vector<Redex> marks = push_redexes(g0, redexes(t, rules));  // u1 => gk(t)
  std::vector<TraceStep> rest = cofinal_steps(u1, steps, from + 1, rules, budget);

  TermPtr a = u1;
  for (size_t i = 1; i < n; ++i) {
    // lift edge (a =marks=> b) to (gk(a) => gk(b))
    std::vector<Redex> ra = redexes(a, rules);
    std::vector<std::vector<Path>> track_ra;
    track_ra.reserve(ra.size());
    for (const Redex& r : ra) track_ra.push_back({r.at});
    DevelopResult dev1 = develop(a, marks, rules, std::move(track_ra));
    spend(budget, dev1.steps.size());
    std::vector<Redex> ra_residuals = tracked_to_redexes(ra, dev1.tracked);
    TermPtr b = dev1.term;

    std::vector<Redex> rb = redexes(b, rules);
    std::vector<std::vector<Path>> track_rb;
    track_rb.reserve(rb.size());
    for (const Redex& r : rb) track_rb.push_back({r.at});
    DevelopResult dev2 = develop(b, ra_residuals, rules, std::move(track_rb));
    spend(budget, dev2.steps.size());
    a = dev2.term;  // = gk(a)
    marks = tracked_to_redexes(rb, dev2.tracked);
  }
  DevelopResult fin = develop(a, marks, rules);
  spend(budget, fin.steps.size());
  rest.insert(rest.end(), fin.steps.begin(), fin.steps.end());
  return rest;
}

}  // namespace

JoinResult join_traces(const TermPtr& t, const ReductionTrace& tr1, const ReductionTrace& tr2,
                       const RuleSet& rules, const Fuel& fuel) {
  JoinResult res;
  for (const auto* tr : {&tr1, &tr2}) {
    if (!alpha_eq(tr->start, t)) {
      res.failure = "trace does not start at the given term";
      return res;
    }
    for (const TraceStep& s : tr->steps) {
      if (s.rule == "omega") {
        res.failure = "join requires beta/constant traces";
        return res;
      }
    }
  }
  size_t n = std::max(tr1.steps.size(), tr2.steps.size());
  uint64_t budget = fuel.max_steps;
  try {
    TermPtr meet = t;
    for (size_t i = 0; i < n; ++i) {
      meet = gross_knuth(meet, rules);
      if (meet->size > fuel.max_size) throw FuelOut{};
    }
    res.meet = meet;
    auto build = [&](const ReductionTrace& tr) {
      std::vector<TraceStep> steps = cofinal_steps(t, tr.steps, 0, rules, budget);
      // extend from gk^{|tr|}(t) to gk^{n}(t)
      TermPtr cur = gk_iterate(t, static_cast<uint32_t>(tr.steps.size()), rules);
      for (size_t i = tr.steps.size(); i < n; ++i) {
        DevelopResult d = develop(cur, redexes(cur, rules), rules);
        spend(budget, d.steps.size());
        steps.insert(steps.end(), d.steps.begin(), d.steps.end());
        cur = d.term;
      }
      ReductionTrace out;
      out.start = tr.end;
      out.steps = std::move(steps);
      out.end = meet;
      return out;
    };
    res.from1 = build(tr1);
    res.from2 = build(tr2);
    // the postcondition is self-verifying: replay both traces
    replay_trace(res.from1, rules, fuel);
    replay_trace(res.from2, rules, fuel);
    res.ok = true;
  } catch (const FuelOut&) {
    res.failure = "join fuel exhausted";
    res.ok = false;
  } catch (const TermSizeError& e) {
    res.failure = e.what();
    res.ok = false;
  }
  return res;
}

// Trace utilities -------------------------------------------------------------

TermPtr replay_trace(const ReductionTrace& tr, const RuleSet& rules, const Fuel& fuel) {
  TermPtr cur = tr.start;
  for (const TraceStep& s : tr.steps) {
    if (s.rule == "omega") {
      TermPtr sub = subterm_at(cur, s.at);
      Solvability sv = solvability(sub, rules, fuel);
      if (sv.verdict != Solvability::Verdict::Unsolvable)
        throw InvalidPathError("omega step on a subterm not certified unsolvable");
    }
    cur = apply_step(cur, s.at, s.rule, rules);
  }
  if (tr.end && !alpha_eq(cur, tr.end))
    throw InvalidPathError("trace replay does not reach the recorded end term");
  return cur;
}

bool replay_ok(const ReductionTrace& tr, const RuleSet& rules, const Fuel& fuel) {
  try {
    replay_trace(tr, rules, fuel);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

ReductionTrace reorder_beta_omega(const ReductionTrace& tr, const RuleSet& rules,
                                  const Fuel& fuel) {
  std::vector<TraceStep> steps = tr.steps;
  while (true) {
    size_t i = 0;
    bool found = false;
    for (; i + 1 < steps.size(); ++i) {
      if (steps[i].rule == "omega" && steps[i + 1].rule != "omega") {
        found = true;
        break;
      }
    }
    if (!found) break;
    // materialize the term before step i
    TermPtr u = tr.start;
    for (size_t j = 0; j < i; ++j) u = apply_step(u, steps[j].at, steps[j].rule, rules);
    Path p = steps[i].at;
    TraceStep beta = steps[i + 1];
    if (is_prefix(p, beta.at)) {
      // a step inside the omega literal can only be its root self-loop; drop it
      if (beta.at != p)
        throw InvalidPathError("beta step strictly inside an omega literal");
      steps.erase(steps.begin() + static_cast<long>(i) + 1);
      continue;
    }
    StepGeometry g = step_geometry(u, beta.at, beta.rule, rules);
    std::vector<Path> res = push_path(g, p);
    std::sort(res.begin(), res.end(), path_less);
    std::vector<TraceStep> replacement;
    replacement.push_back(beta);
    for (const Path& rp : res) replacement.push_back({rp, "omega"});
    steps.erase(steps.begin() + static_cast<long>(i), steps.begin() + static_cast<long>(i) + 2);
    steps.insert(steps.begin() + static_cast<long>(i), replacement.begin(), replacement.end());
  }
  ReductionTrace out;
  out.start = tr.start;
  out.steps = std::move(steps);
  ReductionTrace probe{out.start, out.steps, nullptr};
  out.end = replay_trace(probe, rules, fuel);
  if (tr.end && !alpha_eq(out.end, tr.end))
    throw InvalidPathError("reordered trace changed the end term");
  return out;
}

}  // namespace lamlab
