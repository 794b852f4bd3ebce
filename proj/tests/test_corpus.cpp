#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lamlab/corpus.hpp"
#include "lamlab/persist.hpp"
#include "lamlab/report.hpp"
#include "test_util.hpp"

using namespace lamlab;
using testutil::parse0;

static const Fuel fuel;

TEST_CASE("all corpus assertions pass") {
  AnalysisConfig cfg;
  for (const std::string& name : corpus_names()) {
    CorpusEntry e = load_corpus(name);
    auto results = run_corpus_assertions(e, cfg);
    CHECK(!results.empty());
    for (const AssertionResult& r : results) {
      INFO(name, ":", r.id, " ", r.detail);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("normalizable shortcut") {
  RuleSet none;
  SUBCASE("F = x") {
    ShortcutResult r = normalizable_shortcut(Term::fvar("x"), "x", none, fuel);
    CHECK(r.kind == ShortcutResult::Kind::InfiniteRange);
    CHECK(r.n == 1);
  }
  SUBCASE("F = (x I)") {
    TermPtr F = parse0("(x I)");
    ShortcutResult r = normalizable_shortcut(F, "x", none, fuel);
    CHECK(r.kind == ShortcutResult::Kind::InfiniteRange);
    CHECK(r.n == F->size);  // the normal form is (x I) itself
    for (const auto& [pair, verdict] : r.pair_verdicts) CHECK(verdict == "Distinct");
  }
  SUBCASE("coxa F is not normalizable") {
    CorpusEntry e = load_corpus("coxa");
    ShortcutResult r =
        normalizable_shortcut(e.content.defs.at("F"), "x", e.content.rules, fuel);
    CHECK(r.kind == ShortcutResult::Kind::NotNormalizable);
    CHECK(r.gk_sizes.size() >= 2);
  }
}

TEST_CASE("distinguish basics") {
  RuleSet none;
  CorpusEntry e = load_corpus("case1");
  TermPtr F = e.content.defs.at("F");
  TermPtr simple = build_Aprime_simple(1);
  // n = m trivially agrees
  CHECK(distinguish(F, "x", simple, "nu", Family::Church, 2, 2, 6, e.content.rules, fuel)
            .verdict == HEqual::Verdict::AgreeToDepth);
  // the numeral family surfaces and separates
  CHECK(distinguish(F, "x", simple, "nu", Family::Church, 1, 2, 6, e.content.rules, fuel)
            .verdict == HEqual::Verdict::Distinct);
  // the tower family separates too
  CHECK(distinguish(F, "x", simple, "nu", Family::Tower, 0, 2, 6, e.content.rules, fuel)
            .verdict == HEqual::Verdict::Distinct);
}

TEST_CASE("scope probe rows") {
  AnalysisConfig cfg;
  cfg.levels = 4;
  CorpusEntry e = load_corpus("case1");
  Tree tree = tree_levels(e.content.defs.at("F"), "x", e.content.defs.at("A"), cfg,
                          e.content.rules);
  BranchData b = find_good_branch(tree, cfg, e.content.rules);
  TermPtr simple = build_Aprime_simple(1);
  auto rows =
      scope_probe(b, "x", simple, "nu", Family::Church, 1, 2, 6, e.content.rules, fuel);
  REQUIRE(rows.size() == b.levels.size());
  // levels with a nonempty argument list expose the numeral
  bool any_distinct = false;
  for (const auto& row : rows)
    if (row.verdict == "Distinct") any_distinct = true;
  CHECK(any_distinct);
  // n = m agrees everywhere
  for (const auto& row :
       scope_probe(b, "x", simple, "nu", Family::Church, 2, 2, 6, e.content.rules, fuel))
    CHECK(row.verdict == "AgreeToDepth");
}

TEST_CASE("reports are replayable: same inputs, same json") {
  CorpusEntry e = load_corpus("e1");
  auto run = [&] {
    TermPtr inst = substitute(e.content.defs.at("F"), "x", e.content.defs.at("B"));
    PersistenceVerdict v = check_persistence(inst, e.content.rules, PersistBudget{});
    return persistence_json(v).dump();
  };
  CHECK(run() == run());
  auto analyze = [&] {
    AnalysisConfig cfg;
    cfg.levels = 4;
    Tree tree = tree_levels(e.content.defs.at("F"), "x", e.content.defs.at("A"), cfg,
                            e.content.rules);
    BranchData b = find_good_branch(tree, cfg, e.content.rules);
    compute_head_events(b, e.content.defs.at("A"), "x", cfg, e.content.rules);
    return analysis_json(tree, b, classify(b, cfg)).dump();
  };
  CHECK(analyze() == analyze());
}

TEST_CASE("persistence scanner reports raw subterm hits") {
  CorpusEntry e = load_corpus("coxa");
  TermPtr inst = substitute(e.content.defs.at("F"), "x", e.content.defs.at("Iprime"));
  PersistBudget b;
  b.depth = 3;
  b.breadth = 40;
  // I occurs as a subterm in every explored reduct; c_7 in none
  PersistenceVerdict with_i = check_persistence(inst, e.content.rules, b, "nu",
                                                combinators().I);
  CHECK(with_i.scan_hits == with_i.explored);
  PersistenceVerdict with_c7 = check_persistence(inst, e.content.rules, b, "nu", church(7));
  CHECK(with_c7.scan_hits == 0);
}
