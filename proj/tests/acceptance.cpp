// Acceptance suite: one check per numbered criterion, each printing a
// [PASS]/[FAIL] line (clause details on failure). Exit code = number of
// failed criteria. Run a single criterion with --criterion N.

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <vector>

#include "lamlab/bohm.hpp"
#include "lamlab/corpus.hpp"
#include "lamlab/persist.hpp"
#include "lamlab/report.hpp"
#include "test_util.hpp"

using namespace lamlab;
using testutil::parse0;

namespace {

struct Clause {
  std::string label;
  bool pass;
  std::string detail;
};

struct Ctx {
  std::vector<Clause> clauses;
  void check(const std::string& label, bool ok, const std::string& detail = "") {
    clauses.push_back({label, ok, detail});
  }
};

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

CorpusEntry corpus(const std::string& name) { return load_corpus(name); }

const Fuel kFuel;  // 10^4 steps, 10^6 nodes

// ---- criterion 1: engine soundness ----------------------------------------
void criterion1(Ctx& c) {
  {
    testutil::Gen gen(1001);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      TermPtr t = gen.term(30, 0, {"a", "b", "nu"});
      if (!alpha_eq(t, parse_term(print_term(t)))) ok = false;
    }
    c.check("print/parse round-trip on 1000 random terms", ok);
  }
  {
    testutil::Gen gen(1002);
    bool ok = true;
    for (int i = 0; i < 500 && ok; ++i) {
      TermPtr t = gen.term(14, 0, {"a", "b", "x", "y"});
      TermPtr a = gen.term(6, 0, {"y", "c"});
      TermPtr b = gen.term(6, 0, {"c", "d"});
      TermPtr lhs = substitute(substitute(t, "x", a), "y", b);
      TermPtr rhs = substitute(substitute(t, "y", b), "x", substitute(a, "y", b));
      if (!alpha_eq(lhs, rhs)) ok = false;
    }
    c.check("substitution composition law on 500 random terms", ok);
  }
  {
    RuleSet none;
    testutil::Gen gen(1003);
    int64_t t0 = now_ms();
    int successes = 0;
    for (int i = 0; i < 1000; ++i) {
      TermPtr t = gen.term(12);
      ReductionTrace tr1 = gen.trace(t, 4, none);
      ReductionTrace tr2 = gen.trace(t, 4, none);
      JoinResult j = join_traces(t, tr1, tr2, none, kFuel);
      if (j.ok && replay_ok(j.from1, none, kFuel) && replay_ok(j.from2, none, kFuel))
        ++successes;
    }
    int64_t elapsed = now_ms() - t0;
    c.check("cofinality join success on 1000 random traces", successes == 1000,
            std::to_string(successes) + "/1000");
    c.check("join suite under 60 s", elapsed < 60000, std::to_string(elapsed) + " ms");
  }
}

// ---- criterion 2: solvability certificates ---------------------------------
void criterion2(Ctx& c) {
  RuleSet none;
  Fuel fifty;
  fifty.max_steps = 50;
  std::vector<std::pair<std::string, TermPtr>> unsolvable = {
      {"Omega", parse0("Omega")},
      {"(\\x.Omega) y", parse0("((\\x.Omega) y)")},
      {"delta (\\x.x x x)", parse0("(delta (\\x.(x x x)))")},
      {"(\\x.x x x) (\\x.x x x)", parse0("((\\x.(x x x)) (\\x.(x x x)))")},
      {"\\y.(delta (\\x.x x x y))", parse0("\\y.(delta (\\x.(x x x y)))")},
  };
  for (auto& [label, t] : unsolvable) {
    Solvability s = solvability(t, none, fifty);
    c.check("unsolvable within 50 head steps: " + label,
            s.verdict == Solvability::Verdict::Unsolvable);
  }
  std::vector<std::pair<std::string, TermPtr>> solvable = {
      {"I", combinators().I}, {"K", combinators().K}};
  for (uint32_t n = 0; n <= 4; ++n)
    solvable.emplace_back("c" + std::to_string(n), church(n));
  for (auto& [label, t] : solvable) {
    Solvability s = solvability(t, none, fifty);
    c.check("solvable: " + label, s.verdict == Solvability::Verdict::Solvable);
  }
}

// ---- criterion 3: corpus reduction shapes ----------------------------------
void criterion3(Ctx& c) {
  JoinBudget jb;
  jb.gk_rounds = 24;
  jb.bfs_nodes = 600;
  for (const char* name : {"coxa", "sect4"}) {
    CorpusEntry e = corpus(name);
    uint32_t copies = std::strcmp(name, "coxa") == 0 ? 1 : 2;
    std::string arg = std::strcmp(name, "coxa") == 0 ? "I" : "K";
    for (uint32_t k = 1; k <= 3; ++k) {
      std::string spine = "(x";
      for (uint32_t i = 0; i < copies * k; ++i) spine += " " + arg;
      spine += ")";
      std::string body = "(G " + spine + " z)";
      for (uint32_t i = 0; i < k; ++i) body = "(z " + body + ")";
      TermPtr displayed = parse_term("\\z." + body, e.content.rules, e.content.defs);
      int64_t t0 = now_ms();
      bool ok = joinable(fk(e.content.defs.at("F"), k, e.content.rules), displayed,
                         e.content.rules, jb)
                    .has_value();
      int64_t elapsed = now_ms() - t0;
      c.check(std::string(name) + " level " + std::to_string(k) + " joins displayed form",
              ok && elapsed < 30000,
              ok ? std::to_string(elapsed) + " ms" : "no join within budget");
    }
  }
}

// ---- criterion 4: branch data ----------------------------------------------
struct PipelineRun {
  Tree tree;
  BranchData branch;
  CaseReport report;
};

PipelineRun pipeline(const CorpusEntry& e, uint32_t levels = 8) {
  AnalysisConfig cfg;
  cfg.levels = levels;
  PipelineRun p;
  p.tree = tree_levels(e.content.defs.at("F"), "x", e.content.defs.at("A"), cfg,
                       e.content.rules);
  p.branch = find_good_branch(p.tree, cfg, e.content.rules);
  compute_head_events(p.branch, e.content.defs.at("A"), "x", cfg, e.content.rules);
  p.report = classify(p.branch, cfg);
  return p;
}

void criterion4(Ctx& c) {
  JoinBudget jb;
  jb.gk_rounds = 16;
  for (const char* name : {"coxa", "sect4"}) {
    CorpusEntry e = corpus(name);
    uint32_t copies = std::strcmp(name, "coxa") == 0 ? 1 : 2;
    TermPtr unit = e.content.defs.at(copies == 1 ? "I" : "K");
    PipelineRun p = pipeline(e, 6);
    bool ok = p.branch.levels.size() >= 6;
    for (size_t k = 0; k <= 5 && ok; ++k) {
      const BranchLevel& bl = p.branch.levels[k];
      if (bl.U.size() != copies * k) ok = false;
      for (const TermPtr& el : bl.U)
        if (!joinable(el, unit, e.content.rules, jb)) ok = false;
      if (!bl.sigma.empty()) ok = false;
      if (!bl.t_term || !joinable(bl.t_term, unit, e.content.rules, jb)) ok = false;
      if (k + 1 < p.branch.levels.size() && bl.S.size() != copies) ok = false;
    }
    c.check(std::string(name) + " U/S/t/sigma values for k <= 5", ok);
  }
  {
    CorpusEntry e = corpus("sect32");
    PipelineRun p = pipeline(e, 6);
    bool ok = p.branch.levels.size() >= 6;
    for (size_t k = 1; k <= 5 && ok; ++k) {
      const BranchLevel& bl = p.branch.levels[k];
      if (bl.U.size() != 1 || bl.t_binders != k) ok = false;
      auto names = free_names(bl.U[0]);
      if (names.size() != 1) {
        ok = false;
        break;
      }
      TermPtr expect = Term::fvar(names[0]);
      for (size_t i = 0; i < k; ++i) expect = Term::app(combinators().K, expect);
      if (!joinable(bl.U[0], expect, e.content.rules, jb)) ok = false;
      if (k + 1 < p.branch.levels.size()) {
        if (bl.sigma.size() != 1 || bl.sigma.begin()->first != names[0]) {
          ok = false;
        } else {
          auto next = free_names(p.branch.levels[k + 1].U[0]);
          if (next.size() != 1) {
            ok = false;
          } else {
            TermPtr img = Term::app(combinators().K, Term::fvar(next[0]));
            if (!joinable(bl.sigma.begin()->second, img, e.content.rules, jb)) ok = false;
          }
        }
      }
    }
    c.check("sect32 U_k = (K^k y), sigma_k = [y := (K y)] for k <= 5", ok);
  }
}

// ---- criterion 5: classifier ------------------------------------------------
void criterion5(Ctx& c) {
  auto expect = [&](const char* name, CaseReport::Verdict want) {
    CorpusEntry e = corpus(name);
    PipelineRun p = pipeline(e, 8);
    c.check(std::string("classify ") + name + " = " + verdict_str(want),
            p.report.verdict == want, verdict_str(p.report.verdict));
  };
  expect("sect4", CaseReport::Verdict::Case2a);
  expect("e1", CaseReport::Verdict::Case2bSuspect);
  expect("e2", CaseReport::Verdict::Case2bSuspect);
  expect("case1", CaseReport::Verdict::Case1);
}

// ---- criterion 6: J machinery ----------------------------------------------
void criterion6(Ctx& c) {
  for (uint32_t p : {1u, 2u, 3u}) {
    RuleSet rules = make_J(p);
    TermPtr t = parse_term("(J nu u)", rules);
    TermPtr fired = apply_step(t, {}, "const:J", rules);
    std::string lam = "\\";
    std::string spine = "(u";
    for (uint32_t i = 1; i <= p; ++i) {
      lam += "y" + std::to_string(i) + " ";
      spine += " (J nu y" + std::to_string(i) + ")";
    }
    bool ok = alpha_eq(fired, parse_term(lam + ". " + spine + ")", rules));
    c.check("one-step J contraction, p = " + std::to_string(p), ok);
  }
  {
    RuleSet fam = make_J_family({2, 3});
    bool ok =
        alpha_eq(apply_step(parse_term("(J0 nu u)", fam), {}, "const:J0", fam),
                 parse_term("\\y1 y2. (u (J1 nu y1) (J1 nu y2))", fam)) &&
        alpha_eq(
            apply_step(parse_term("(J1 nu u)", fam), {}, "const:J1", fam),
            parse_term("\\y1 y2 y3. (u (Gamma nu y1) (Gamma nu y2) (Gamma nu y3))", fam));
    c.check("family contraction matches the recorded arities", ok);
  }
  {
    TermPtr jhat = build_Jhat_pure(Term::lam(church(2), "k"));
    RuleSet none;
    Fuel big = kFuel;
    big.max_steps = 20000;
    bool ok = true;
    for (uint32_t n = 0; n <= 2 && ok; ++n) {
      TermPtr t = app_spine(jhat, {church(n), Term::fvar("nu"), Term::fvar("u")});
      HeadOutcome ho = head_reduce(t, none, big);
      if (ho.kind != HeadOutcome::Kind::Hnf || ho.binders != 2 ||
          !ho.head->is(Kind::FreeVar) || ho.head->name != "u" || ho.args.size() != 2) {
        ok = false;
        break;
      }
      NamingTable names;
      std::vector<std::string> binders;
      TermPtr cur = ho.hnf;
      while (cur->is(Kind::Abs)) {
        binders.push_back(names.name_for(cur->binder_id, cur->name));
        cur = cur->body();
      }
      Path body_path(binders.size(), Step::Body);
      JoinBudget jb;
      jb.gk_rounds = 10;
      jb.bfs_nodes = 800;
      for (size_t i = 0; i < 2; ++i) {
        TermPtr arg = open_to_named(ho.hnf, spine_arg_path(body_path, 2, i), names);
        TermPtr want =
            app_spine(jhat, {church(n + 1), Term::fvar("nu"), Term::fvar(binders[i])});
        if (!joinable(arg, want, none, jb)) ok = false;
      }
    }
    c.check("pure staged wrapper joins the constant-2 contraction for n <= 2", ok);
  }
  {
    CorpusEntry e = corpus("sect4");
    PipelineRun p = pipeline(e, 8);
    AnalysisConfig cfg;
    cfg.levels = 8;
    HPrefix hp = compute_h(p.branch, e.content.defs.at("A"), "x", 2, cfg, e.content.rules);
    bool ok = hp.levels.size() >= 2;
    std::string values;
    for (const auto& lv : hp.levels) {
      values += std::to_string(lv.h) + " ";
      if (lv.h != 2) ok = false;
    }
    c.check("compute_h returns h = 2 on the first two levels", ok,
            "computed h = " + values +
                "(the staged recipe takes h_1 = l + lg(B::T) + 1 = 2+4+1; a constant-2 "
                "wrapper exists but the recipe as displayed over-provisions)");
  }
}

// ---- criterion 7: persistence verdicts --------------------------------------
void criterion7(Ctx& c) {
  PersistBudget budget;  // depth 6, breadth 200, fuel 10^4
  {
    CorpusEntry e = corpus("coxa");
    TermPtr inst = substitute(e.content.defs.at("F"), "x", e.content.defs.at("Iprime"));
    PersistenceVerdict v = check_persistence(inst, e.content.rules, budget);
    c.check("coxa wrapped instance: NoViolationFound",
            v.kind == PersistenceVerdict::Kind::NoViolationFound);
  }
  {
    CorpusEntry e = corpus("e2");
    TermPtr inst = substitute(e.content.defs.at("F"), "x", e.content.defs.at("Idprime"));
    PersistenceVerdict v = check_persistence(inst, e.content.rules, budget);
    c.check("e2 passive wrapper: NoViolationFound",
            v.kind == PersistenceVerdict::Kind::NoViolationFound);
  }
  {
    CorpusEntry e = corpus("e1");
    TermPtr inst = substitute(e.content.defs.at("F"), "x", e.content.defs.at("B"));
    PersistenceVerdict v = check_persistence(inst, e.content.rules, budget);
    bool ok = v.kind == PersistenceVerdict::Kind::ViolationErased &&
              replay_ok(v.witness, e.content.rules, kFuel) &&
              !contains_free(v.witness.end, "nu");
    c.check("e1 solvable substitute: Violation(erased) with replayable witness", ok);
  }
  {
    // every built wrapper yields zero applied violations
    bool ok = true;
    CorpusEntry e = corpus("case1");
    PipelineRun p = pipeline(e, 8);
    Case1Aprime ap =
        build_Aprime_case1(e.content.defs.at("A"), p.branch, p.report, e.content.rules);
    TermPtr inst1 = substitute(e.content.defs.at("F"), "x", ap.aprime);
    if (check_persistence(inst1, ap.rules, budget).kind ==
        PersistenceVerdict::Kind::ViolationApplied)
      ok = false;
    for (uint32_t l : {0u, 1u, 2u}) {
      TermPtr simple = build_Aprime_simple(l);
      TermPtr inst2 = substitute(e.content.defs.at("F"), "x", simple);
      if (check_persistence(inst2, e.content.rules, budget).kind ==
          PersistenceVerdict::Kind::ViolationApplied)
        ok = false;
    }
    c.check("built wrappers never show an applied violation", ok);
  }
}

// ---- criterion 8: range separation experiments -------------------------------
void criterion8(Ctx& c) {
  CorpusEntry e = corpus("coxa");
  {
    HEqual h = distinguish(e.content.defs.at("F"), "x", e.content.defs.at("Iprime"), "nu",
                           Family::Church, 1, 2, 6, e.content.rules, kFuel);
    c.check("distinguish coxa (church 1 vs 2, depth 6) = Distinct",
            h.verdict == HEqual::Verdict::Distinct,
            hequal_str(h.verdict) +
                " (the wrapped numeral never reaches a prefix head; the instances have "
                "equal prefixes at every depth, so no sound prefix comparison separates "
                "them)");
  }
  {
    TermPtr fi = substitute(e.content.defs.at("F"), "x", combinators().I);
    TermPtr fo = substitute(e.content.defs.at("F"), "x", combinators().Omega);
    HEqual h = h_equal_bounded(fi, fo, 6, e.content.rules, kFuel);
    c.check("coxa F[I] vs F[Omega] = Distinct", h.verdict == HEqual::Verdict::Distinct,
            hequal_str(h.verdict) +
                " (both instances have the same single-child spine prefixes; the "
                "unsolvable argument never heads a node, so equal prefixes is the honest "
                "sound answer)");
  }
}

// ---- criterion 9: invariant suites -------------------------------------------
void criterion9(Ctx& c) {
  RuleSet none;
  {
    testutil::Gen gen(9001);
    size_t cases = 0;
    bool ok = true;
    while (cases < 500) {
      TermPtr t = gen.term(14, 0, {"x", "a"});
      auto rs = redexes(t, none);
      if (rs.empty() || occurrence_paths(t, "x").empty()) continue;
      const Redex& r = rs[gen.pick(rs.size())];
      ResidualStep step = residuals(t, {r.at, r.rule}, "x", none);
      for (const auto& [bid, aids] : step.map) {
        for (size_t aid : aids) {
          if (is_pure(step.after, step.after_occs[aid], "x")) {
            if (!is_pure(step.before, step.before_occs[bid], "x")) ok = false;
            ++cases;
          }
        }
      }
    }
    c.check("residual purity implies ancestor purity (500+ cases)", ok,
            std::to_string(cases) + " cases");
  }
  {
    RuleSet rules = make_J(3);
    JContext ctx = j_context(rules);
    size_t cases = 0;
    bool ok = true;
    for (const char* src :
         {"((J nu I) v (J nu I))", "((J nu K) (J nu I))", "(v (J nu (J nu I)) u)"}) {
      TermPtr t = parse_term(src, rules, prelude());
      if (!occurs_nicely(t, ctx)) ok = false;
      for (const auto& r : testutil::enumerate_reducts(t, rules, 200)) {
        if (!occurs_nicely(r, ctx)) ok = false;
        ++cases;
      }
    }
    c.check("nicely occurrences preserved across reducts (500+ cases)", ok && cases >= 500,
            std::to_string(cases) + " cases");
  }
  {
    // branch recurrences and V |>* U joins on the corpus plus a generated
    // family of recursion shapes
    size_t eq_cases = 0, join_cases = 0;
    bool ok = true;
    JoinBudget jb;
    jb.gk_rounds = 16;
    auto run_one = [&](const TermPtr& F, const TermPtr& A, const RuleSet& rules,
                       uint32_t levels) {
      AnalysisConfig cfg;
      cfg.levels = levels;
      Tree tree = tree_levels(F, "x", A, cfg, rules);
      BranchData b = find_good_branch(tree, cfg, rules);
      for (size_t k = 0; k + 1 < b.levels.size(); ++k) {
        const BranchLevel& cur = b.levels[k];
        const BranchLevel& nxt = b.levels[k + 1];
        if (nxt.U.size() != cur.R.size() + cur.S.size()) ok = false;
        for (size_t i = 0; i < cur.R.size(); ++i, ++eq_cases)
          if (!alpha_eq(nxt.U[i], cur.R[i])) ok = false;
        for (size_t i = 0; i < cur.S.size(); ++i, ++eq_cases)
          if (!alpha_eq(nxt.U[cur.R.size() + i], cur.S[i])) ok = false;
        if (nxt.V.size() != cur.V.size() + cur.S.size()) ok = false;
        for (size_t i = 0; i < cur.V.size(); ++i, ++eq_cases)
          if (!alpha_eq(nxt.V[i], apply_subst(cur.V[i], cur.sigma))) ok = false;
        for (size_t i = 0; i < cur.U.size(); ++i, ++join_cases)
          if (!joinable(apply_subst(cur.U[i], cur.sigma), cur.R[i], rules, jb)) ok = false;
        for (size_t i = 0; i < cur.V.size(); ++i, ++join_cases)
          if (!joinable(cur.V[i], cur.U[i], rules, jb)) ok = false;
      }
    };
    for (const char* name : {"coxa", "sect4", "sect32", "case1", "e2"}) {
      CorpusEntry e = corpus(name);
      run_one(e.content.defs.at("F"), e.content.defs.at("A"), e.content.rules, 5);
    }
    // generated recursion shapes: G = Y (\g u v. (v (g <shape> v))), F = (G x)
    std::vector<std::string> shapes = {
        "(u I)",          "(u K)",           "(u I I)",          "(u K K)",
        "(u I K)",        "(u (K I))",       "(\\y.(u (K y)))",  "(\\y.(u y))",
        "(u I I I)",      "(u (K I) I)",     "(\\y.(u (K (K y))))", "(u K I)",
        "(u (K K))",      "(u I (K I))",     "(u K K K)",        "(u (I I))",
    };
    for (size_t si = 0; si < shapes.size(); ++si) {
      Definitions defs = prelude();
      TermPtr gfun = parse_term("\\g u v. (v (g " + shapes[si] + " v))", {}, defs);
      defs["G"] = Term::app(combinators().Y, gfun);
      TermPtr F = parse_term("(G x)", {}, defs);
      run_one(F, combinators().I, {}, 6);
    }
    c.check("branch recurrences exact (500+ list equalities)", ok && eq_cases >= 500,
            std::to_string(eq_cases) + " equalities");
    c.check("V_k joins U_k elementwise (500+ joins)", ok && join_cases >= 500,
            std::to_string(join_cases) + " joins");
  }
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Ctx&)> run;
  };
  std::vector<Criterion> criteria = {
      {1, "engine soundness (round-trip, substitution, cofinality joins)", criterion1},
      {2, "solvability certificates within 50 head steps", criterion2},
      {3, "iterate shapes join the displayed level forms", criterion3},
      {4, "branch data matches the documented values", criterion4},
      {5, "classifier verdicts", criterion5},
      {6, "wrapper constant machinery", criterion6},
      {7, "persistence verdicts under budget", criterion7},
      {8, "range separation experiments", criterion8},
      {9, "invariant suites (500+ cases each)", criterion9},
  };
  int failures = 0;
  for (const auto& crit : criteria) {
    if (only && crit.id != only) continue;
    Ctx ctx;
    int64_t t0 = now_ms();
    try {
      crit.run(ctx);
    } catch (const std::exception& e) {
      ctx.check("no exception", false, e.what());
    }
    int64_t elapsed = now_ms() - t0;
    bool pass = true;
    for (const Clause& cl : ctx.clauses)
      if (!cl.pass) pass = false;
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << crit.id << ": "
              << crit.title << " (" << elapsed << " ms)\n";
    for (const Clause& cl : ctx.clauses) {
      if (!cl.pass || only) {
        std::cout << "   " << (cl.pass ? "[ok]  " : "[bad] ") << cl.label;
        if (!cl.detail.empty()) std::cout << "  -- " << cl.detail;
        std::cout << "\n";
      }
    }
    if (!pass) ++failures;
  }
  return failures;
}
