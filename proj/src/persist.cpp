#include "lamlab/persist.hpp"

#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace lamlab {

JContext j_context(const RuleSet& rules, std::string nu) {
  JContext ctx;
  ctx.j_consts = rules.j_like_names();
  ctx.nu = std::move(nu);
  return ctx;
}

namespace {
TermPtr j_rule_body(const std::string& next_name, uint32_t p) {
  // under parameters a, u: \y_1..y_p. (u (Next a y_1) ... (Next a y_p))
  std::vector<std::string> ys;
  for (uint32_t i = 1; i <= p; ++i) ys.push_back("y" + std::to_string(i));
  std::vector<TermPtr> wrapped;
  for (const auto& y : ys)
    wrapped.push_back(app_spine(Term::cnst(next_name), {Term::fvar("@a"), Term::fvar(y)}));
  TermPtr body = abs_named(app_spine(Term::fvar("@u"), wrapped), ys);
  return close_named_body(body, {"@a", "@u"});
}
}  // namespace

RuleSet make_J(uint32_t p, const std::string& name, RuleSet base) {
  if (p < 1) throw std::invalid_argument("J arity block must be at least 1");
  Rule r;
  r.arity = 2;
  r.j_like = true;
  r.body = j_rule_body(name, p);
  base.declare(name, r);
  return base;
}

RuleSet make_J_family(const std::vector<uint32_t>& h, bool gamma_fallback,
                      const std::string& prefix, const std::string& gamma, RuleSet base) {
  if (h.empty()) throw std::invalid_argument("family needs at least one level");
  for (uint32_t hn : h)
    if (hn < 1) throw std::invalid_argument("family arities must be at least 1");
  if (gamma_fallback) {
    Rule g;
    g.arity = 2;
    g.j_like = true;  // (Gamma nu x) still shields nu
    base.declare(gamma, g);
  }
  for (size_t n = 0; n < h.size(); ++n) {
    std::string next;
    if (n + 1 < h.size()) {
      next = prefix + std::to_string(n + 1);
    } else if (gamma_fallback) {
      next = gamma;
    }
    Rule r;
    r.arity = 2;
    r.j_like = true;
    if (next.empty()) {
      r.overrun_error = true;  // firing past the recorded levels is an error
    } else {
      r.body = j_rule_body(next, h[n]);
    }
    base.declare(prefix + std::to_string(n), r);
  }
  return base;
}

namespace {

bool matches_j_wrap(const TermPtr& t, const JContext& ctx, TermPtr* inner) {
  // (J nu e): App(App(Const J, FreeVar nu), e)
  if (!t->is(Kind::App)) return false;
  const TermPtr& f = t->fun();
  if (!f->is(Kind::App)) return false;
  if (!f->fun()->is(Kind::Const) || !ctx.is_j(f->fun()->name)) return false;
  if (!f->arg()->is(Kind::FreeVar) || f->arg()->name != ctx.nu) return false;
  if (inner) *inner = t->arg();
  return true;
}

InE in_E_rec(const TermPtr& t, const TermPtr& u, const JContext& ctx, uint32_t& budget) {
  if (budget == 0) return {false, true};
  --budget;
  if (alpha_eq(t, u)) return {true, false};
  TermPtr inner;
  if (matches_j_wrap(t, ctx, &inner)) return in_E_rec(inner, u, ctx, budget);
  if (t->is(Kind::Abs)) {
    // \y_1..y_m. (e_u e_{y_1} ... e_{y_m})
    std::vector<std::string> ynames;
    NamingTable local;
    Path into;
    TermPtr cur = t;
    while (cur->is(Kind::Abs)) {
      ynames.push_back(local.name_for(cur->binder_id, cur->name));
      into.push_back(Step::Body);
      cur = cur->body();
    }
    TermPtr body = open_to_named(t, into, local);
    Spine sp = spine_of(body);
    size_t m = ynames.size();
    if (sp.args.size() < m) return {false, false};
    TermPtr prefix = app_spine(sp.head, std::vector<TermPtr>(
                                            sp.args.begin(),
                                            sp.args.end() - static_cast<long>(m)));
    // the bound variables may not occur in e_u
    for (const auto& y : ynames)
      if (contains_free(prefix, y)) return {false, false};
    InE acc = in_E_rec(prefix, u, ctx, budget);
    if (!acc.member) return acc;
    for (size_t i = 0; i < m; ++i) {
      InE sub = in_E_rec(sp.args[sp.args.size() - m + i], Term::fvar(ynames[i]), ctx, budget);
      if (!sub.member) return sub;
    }
    return {true, false};
  }
  return {false, false};
}

}  // namespace

InE in_E(const TermPtr& t, const TermPtr& u, const JContext& ctx, uint32_t budget) {
  return in_E_rec(t, u, ctx, budget);
}

TermPtr j_expand(const TermPtr& t, const Path& at, const std::string& j_name,
                 const std::string& nu) {
  TermPtr sub = subterm_at(t, at);
  TermPtr wrapped = app_spine(Term::cnst(j_name), {Term::fvar(nu), sub});
  return replace_at(t, at, wrapped);
}

bool occurs_nicely(const TermPtr& t, const JContext& ctx) {
  for (const Path& p : occurrence_paths(t, ctx.nu)) {
    if (p.empty() || p.back() != Step::Arg) return false;
    Path parent(p.begin(), p.end() - 1);
    TermPtr node = subterm_at(t, parent);
    if (!node->fun()->is(Kind::Const) || !ctx.is_j(node->fun()->name)) return false;
  }
  return true;
}

Correctly occurs_correctly(const TermPtr& t, const JContext& ctx, const RuleSet& rules,
                           const Fuel& fuel, uint32_t in_e_budget) {
  Correctly res;
  if (!occurs_nicely(t, ctx)) {
    res.v = Correctly::V::No;
    res.note = "nu does not occur nicely";
    return res;
  }
  HeadOutcome ho = head_reduce(t, rules, fuel);
  if (ho.kind == HeadOutcome::Kind::CycleCertified) {
    res.v = Correctly::V::No;
    res.note = "term certified unsolvable";
    return res;
  }
  if (ho.kind == HeadOutcome::Kind::FuelExhausted) {
    res.v = Correctly::V::Unknown;
    res.note = "head reduction ran out of fuel";
    return res;
  }
  // binder names of the hnf, outermost first
  NamingTable names;
  std::vector<std::string> binders;
  {
    TermPtr cur = ho.hnf;
    while (cur->is(Kind::Abs)) {
      binders.push_back(names.name_for(cur->binder_id, cur->name));
      cur = cur->body();
    }
  }
  size_t m = binders.size(), n = ho.args.size();
  std::vector<TermPtr> named_args;
  {
    Path body_path(m, Step::Body);
    for (size_t j = 0; j < n; ++j)
      named_args.push_back(open_to_named(ho.hnf, spine_arg_path(body_path, n, j), names));
  }
  bool budget_hit = false;
  for (size_t r = 1; r <= std::min(m, n); ++r) {
    bool ok = true, nu_seen = false;
    for (size_t i = 0; i < r && ok; ++i) {
      const TermPtr& arg = named_args[n - r + i];
      InE ie = in_E(arg, Term::fvar(binders[m - r + i]), ctx, in_e_budget);
      if (ie.budget_exhausted) budget_hit = true;
      if (!ie.member) ok = false;
      if (contains_free(arg, ctx.nu)) nu_seen = true;
    }
    if (ok && nu_seen) {
      res.v = Correctly::V::Yes;
      res.tail_len = static_cast<uint32_t>(r);
      return res;
    }
  }
  res.v = budget_hit ? Correctly::V::Unknown : Correctly::V::No;
  res.note = budget_hit ? "grammar membership budget exceeded"
                        : "no trailing binder block matches the grammar";
  return res;
}

TermPtr build_Aprime_simple(uint32_t l, const std::string& nu) {
  TermPtr body = Term::lam(Term::app(Term::bvar(0), Term::fvar(nu)), "z");
  for (uint32_t i = l; i-- > 0;) body = Term::lam(body, "x" + std::to_string(i + 1));
  return body;
}

Case1Aprime build_Aprime_case1(const TermPtr& A, const BranchData& branch,
                               const CaseReport& report, const RuleSet& base,
                               const std::string& nu) {
  if (report.verdict != CaseReport::Verdict::Case1 || !report.bound_l)
    throw std::invalid_argument("the branch was not classified into the bounded case");
  if (report.head_stability == CaseReport::HeadStability::Unstable)
    throw UnstableHeadVariableError();
  uint32_t z_len = branch.levels.back().t_binders;
  Case1Aprime out;
  out.p = z_len + *report.bound_l + 2;
  out.rules = make_J(out.p, "J", base);
  out.aprime = app_spine(Term::cnst("J"), {Term::fvar(nu), A});
  return out;
}

HPrefix compute_h(const BranchData& branch, const TermPtr& A, const std::string& x,
                  uint32_t budget_levels, const AnalysisConfig& cfg, const RuleSet& rules) {
  HPrefix out;
  if (budget_levels == 0) return out;
  const std::string nu = "nu";
  auto v_args = [&](size_t run) {
    std::vector<TermPtr> args;
    for (const TermPtr& e : branch.levels[run].V) args.push_back(substitute(e, x, A));
    return args;
  };
  auto l_of = [&](size_t i) { return branch.levels[i].t_binders; };
  auto s_span_len = [&](size_t lo, size_t hi_excl) {
    size_t n = 0;
    for (size_t i = lo; i < hi_excl && i < branch.levels.size(); ++i)
      n += branch.levels[i].S.size();
    return n;
  };
  // the staged-family probe run: ((J0 nu A) V_j[A]) head-reduced to the
  // Gamma-headed hnf
  struct Probe {
    bool ok = false;
    uint32_t binders = 0;
    TermPtr a;
    std::vector<TermPtr> b;
    size_t spine_args = 0;
    std::string note;
  };
  auto probe = [&](const std::vector<uint32_t>& h, size_t run) {
    Probe pr;
    RuleSet fam = make_J_family(h, true, "J", "Gamma", rules);
    TermPtr start = app_spine(Term::cnst("J0"), {Term::fvar(nu), A});
    HeadOutcome ho = head_reduce(app_spine(start, v_args(run)), fam, cfg.fuel);
    if (ho.kind != HeadOutcome::Kind::Hnf) {
      pr.note = "probe run did not reach a head normal form";
      return pr;
    }
    if (!ho.head->is(Kind::Const) || ho.head->name != "Gamma") {
      pr.note = "probe run did not stop on the fake constant";
      return pr;
    }
    if (ho.args.size() < 2 || !ho.args[0]->is(Kind::FreeVar) || ho.args[0]->name != nu) {
      pr.note = "fake constant is not applied to nu first";
      return pr;
    }
    pr.ok = true;
    pr.binders = ho.binders;
    pr.a = ho.args[1];
    pr.b.assign(ho.args.begin() + 2, ho.args.end());
    pr.spine_args = ho.args.size();
    return pr;
  };

  // step 0: least run with any S element reaching head position
  size_t j0 = SIZE_MAX;
  for (const HeadEvent& e : branch.events) j0 = std::min<size_t>(j0, e.run_k);
  if (j0 == SIZE_MAX) {
    out.horizon_exhausted = true;
    out.note = "no S element reaches head position within the explored horizon";
    return out;
  }
  std::vector<uint32_t> h;
  {
    uint32_t k0 = static_cast<uint32_t>(branch.levels[j0].V.size());
    h.push_back(std::max<uint32_t>(static_cast<uint32_t>(l_of(0)), k0));
    Probe pr = probe(h, j0);
    if (!pr.ok) {
      out.horizon_exhausted = true;
      out.note = pr.note;
      return out;
    }
    HPrefix::Level lv;
    lv.j = j0;
    lv.h = h[0];
    lv.x_len = pr.binders;
    lv.a = pr.a;
    lv.b = pr.b;
    lv.l_used = static_cast<uint32_t>(l_of(0));
    lv.v_len = k0;
    out.levels.push_back(std::move(lv));
  }
  while (out.levels.size() < budget_levels) {
    const HPrefix::Level& prev = out.levels.back();
    // least run past j_n with an event from an S block that overshoots the
    // recorded binder prefix
    size_t jn1 = SIZE_MAX;
    for (const HeadEvent& e : branch.events) {
      if (e.run_k <= prev.j) continue;
      if (prev.x_len < s_span_len(prev.j, e.source_k)) jn1 = std::min<size_t>(jn1, e.run_k);
    }
    if (jn1 == SIZE_MAX) {
      out.horizon_exhausted = true;
      out.note = "no qualifying later run within the explored horizon";
      return out;
    }
    Probe tail = probe(h, jn1);
    if (!tail.ok) {
      out.horizon_exhausted = true;
      out.note = tail.note;
      return out;
    }
    uint32_t bt_len = static_cast<uint32_t>(tail.spine_args - 2);
    uint32_t hn1 = static_cast<uint32_t>(l_of(prev.j)) + bt_len + 1;
    h.push_back(hn1);
    Probe pr = probe(h, jn1);
    if (!pr.ok) {
      out.horizon_exhausted = true;
      out.note = pr.note;
      return out;
    }
    HPrefix::Level lv;
    lv.j = jn1;
    lv.h = hn1;
    lv.x_len = pr.binders;
    lv.a = pr.a;
    lv.b = pr.b;
    lv.l_used = static_cast<uint32_t>(l_of(prev.j));
    lv.bt_len = bt_len;
    out.levels.push_back(std::move(lv));
  }
  return out;
}

TermPtr build_Jhat_pure(const TermPtr& h_term) {
  if (!free_names(h_term).empty() || has_dangling(h_term))
    throw std::invalid_argument("the arity function must be a closed term");
  const Combinators& C = combinators();
  // T = \a b c. (a (b (z (Suc k) n c)))
  TermPtr inner = app_spine(Term::fvar("@z"), {Term::app(C.Suc, Term::fvar("@k")),
                                               Term::fvar("@n"), Term::fvar("@c")});
  TermPtr T = abs_named(Term::app(Term::fvar("@a"), Term::app(Term::fvar("@b"), inner)),
                        {"@a", "@b", "@c"});
  // D = \k n x. (H k T I x)
  TermPtr D_body = app_spine(h_term, {Term::fvar("@k"), T, C.I, Term::fvar("@x")});
  TermPtr D = abs_named(D_body, {"@k", "@n", "@x"});
  return Term::app(C.Y, abs_named(D, {"@z"}));
}

bool subterm_occurs(const TermPtr& t, const TermPtr& target) {
  if (t->size < target->size) return false;
  if (alpha_eq(t, target)) return true;
  switch (t->kind) {
    case Kind::Abs: return subterm_occurs(t->body(), target);
    case Kind::App:
      return subterm_occurs(t->fun(), target) || subterm_occurs(t->arg(), target);
    default: return false;
  }
}

namespace {

std::optional<Path> find_applied(const TermPtr& t, const std::string& nu, Path& cur) {
  switch (t->kind) {
    case Kind::App: {
      if (t->fun()->is(Kind::FreeVar) && t->fun()->name == nu) return cur;
      cur.push_back(Step::Fun);
      if (auto p = find_applied(t->fun(), nu, cur)) return p;
      cur.back() = Step::Arg;
      if (auto p = find_applied(t->arg(), nu, cur)) return p;
      cur.pop_back();
      return std::nullopt;
    }
    case Kind::Abs: {
      cur.push_back(Step::Body);
      if (auto p = find_applied(t->body(), nu, cur)) return p;
      cur.pop_back();
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

// Omega-collapse as explicit steps at the maximal certified subterms.
struct CollapseSteps {
  TermPtr term;
  std::vector<TraceStep> steps;
};

void collapse_paths(const TermPtr& t, const RuleSet& rules, const Fuel& fuel, Path& cur,
                    std::vector<Path>& out,
                    std::unordered_map<std::string, Solvability::Verdict>& memo) {
  std::string code = term_code(t);
  auto it = memo.find(code);
  Solvability::Verdict v;
  if (it != memo.end()) {
    v = it->second;
  } else {
    v = solvability(t, rules, fuel).verdict;
    memo.emplace(std::move(code), v);
  }
  if (v == Solvability::Verdict::Unsolvable) {
    if (!alpha_eq(t, combinators().Omega)) out.push_back(cur);
    return;  // maximal certified subterm; no need to look deeper
  }
  switch (t->kind) {
    case Kind::Abs:
      cur.push_back(Step::Body);
      collapse_paths(t->body(), rules, fuel, cur, out, memo);
      cur.pop_back();
      break;
    case Kind::App:
      cur.push_back(Step::Fun);
      collapse_paths(t->fun(), rules, fuel, cur, out, memo);
      cur.back() = Step::Arg;
      collapse_paths(t->arg(), rules, fuel, cur, out, memo);
      cur.pop_back();
      break;
    default: break;
  }
}

CollapseSteps collapse_with_steps(const TermPtr& t, const RuleSet& rules, const Fuel& fuel,
                                  std::unordered_map<std::string, Solvability::Verdict>& memo) {
  CollapseSteps cs;
  std::vector<Path> paths;
  Path cur;
  collapse_paths(t, rules, fuel, cur, paths, memo);
  cs.term = t;
  for (const Path& p : paths) {  // paths are pairwise disjoint
    cs.term = apply_step(cs.term, p, "omega", rules);
    cs.steps.push_back({p, "omega"});
  }
  return cs;
}

}  // namespace

PersistenceVerdict check_persistence(const TermPtr& F_inst, const RuleSet& rules,
                                     const PersistBudget& budget, const std::string& nu,
                                     const TermPtr& scan_for) {
  PersistenceVerdict out;
  out.kind = PersistenceVerdict::Kind::NoViolationFound;

  struct Node {
    TermPtr term;
    long parent;
    std::vector<TraceStep> steps_from_parent;
    uint32_t depth;
  };
  std::vector<Node> nodes;
  std::deque<size_t> queue;
  std::unordered_set<std::string> seen;
  std::unordered_map<std::string, Solvability::Verdict> solv_memo;

  auto witness_to = [&](size_t id) {
    ReductionTrace tr;
    tr.start = F_inst;
    std::vector<size_t> chain;
    for (long i = static_cast<long>(id); i >= 0; i = nodes[static_cast<size_t>(i)].parent)
      chain.push_back(static_cast<size_t>(i));
    for (size_t i = chain.size(); i-- > 0;) {
      const auto& st = nodes[chain[i]].steps_from_parent;
      tr.steps.insert(tr.steps.end(), st.begin(), st.end());
    }
    tr.end = nodes[id].term;
    return tr;
  };

  auto inspect = [&](size_t id) -> bool {
    const TermPtr& t = nodes[id].term;
    if (scan_for && subterm_occurs(t, scan_for)) ++out.scan_hits;
    Path cur;
    if (find_applied(t, nu, cur)) {
      out.kind = PersistenceVerdict::Kind::ViolationApplied;
      out.witness = witness_to(id);
      return true;
    }
    if (!contains_free(t, nu)) {
      out.kind = PersistenceVerdict::Kind::ViolationErased;
      out.witness = witness_to(id);
      return true;
    }
    return false;
  };

  nodes.push_back({F_inst, -1, {}, 0});
  seen.insert(term_code(F_inst));
  out.explored = 1;
  if (inspect(0)) return out;
  queue.push_back(0);

  while (!queue.empty() && out.explored < budget.breadth) {
    size_t id = queue.front();
    queue.pop_front();
    const Node node = nodes[id];
    if (node.depth >= budget.depth) continue;

    // successors: leftmost step, Gross-Knuth step, Omega collapse
    std::vector<std::pair<TermPtr, std::vector<TraceStep>>> succs;
    auto rs = redexes(node.term, rules);
    if (!rs.empty()) {
      try {
        succs.emplace_back(apply_step(node.term, rs[0].at, rs[0].rule, rules),
                           std::vector<TraceStep>{{rs[0].at, rs[0].rule}});
      } catch (const TermSizeError&) {
      }
      try {
        DevelopResult d = develop(node.term, rs, rules);
        out.steps_used += d.steps.size();
        succs.emplace_back(d.term, std::move(d.steps));
      } catch (const TermSizeError&) {
      }
    }
    {
      CollapseSteps cs = collapse_with_steps(node.term, rules, budget.fuel, solv_memo);
      if (!cs.steps.empty()) succs.emplace_back(cs.term, std::move(cs.steps));
    }
    for (auto& [term, steps] : succs) {
      if (term->size > budget.fuel.max_size) continue;
      if (!seen.insert(term_code(term)).second) continue;
      nodes.push_back({term, static_cast<long>(id), std::move(steps), node.depth + 1});
      out.max_depth = std::max(out.max_depth, node.depth + 1);
      ++out.explored;
      out.steps_used += nodes.back().steps_from_parent.size();
      if (inspect(nodes.size() - 1)) return out;
      queue.push_back(nodes.size() - 1);
      if (out.explored >= budget.breadth) break;
    }
  }
  return out;
}

}  // namespace lamlab
