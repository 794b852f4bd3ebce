#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lamlab/parse.hpp"
#include "lamlab/reduce.hpp"
#include "lamlab/term.hpp"
#include "test_util.hpp"

using namespace lamlab;
using testutil::parse0;

TEST_CASE("parse basics") {
  TermPtr id = parse_term("\\x.x");
  CHECK(id->is(Kind::Abs));
  CHECK(id->body()->is(Kind::BoundVar));
  CHECK(id->body()->index == 0);

  TermPtr omega = parse0("((\\x.(x x)) (\\x.(x x)))");
  CHECK(alpha_eq(omega, combinators().Omega));

  // application is left-associative
  TermPtr t = parse_term("(u a b c)");
  CHECK(t->is(Kind::App));
  CHECK(t->fun()->is(Kind::App));
  CHECK(t->fun()->fun()->is(Kind::App));
  CHECK(t->fun()->fun()->fun()->name == "u");
  CHECK(t->arg()->name == "c");

  // lambda binds to the right maximally
  TermPtr lam = parse_term("\\x.x y");
  CHECK(lam->is(Kind::Abs));
  CHECK(lam->body()->is(Kind::App));

  // unknown identifiers are free variables, never an error
  TermPtr fv = parse_term("Zzz");
  CHECK(fv->is(Kind::FreeVar));

  CHECK_THROWS_AS(parse_term("(x"), ParseError);
  CHECK_THROWS_AS(parse_term(")"), ParseError);
}

TEST_CASE("parse positions in errors") {
  try {
    parse_term("\\x. (x $)");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.col > 1);
  }
}

TEST_CASE("substitute") {
  TermPtr xx = parse_term("(x x)");
  CHECK(alpha_eq(substitute(xx, "x", combinators().I), parse0("(I I)")));

  // capture avoidance is structural with de Bruijn
  TermPtr t = parse_term("\\y.x");
  TermPtr s = Term::fvar("y");
  TermPtr r = substitute(t, "x", s);
  CHECK(r->is(Kind::Abs));
  CHECK(r->body()->is(Kind::FreeVar));
  CHECK(r->body()->name == "y");

  TermPtr f = parse_term("(G x)");
  CHECK(alpha_eq(substitute(f, "x", combinators().Omega), parse0("(G Omega)")));
}

TEST_CASE("substitution composition law") {
  testutil::Gen gen(7);
  int done = 0;
  for (int i = 0; i < 300; ++i) {
    TermPtr t = gen.term(14, 0, {"a", "b", "x", "y"});
    TermPtr a = gen.term(6, 0, {"y", "c"});
    TermPtr b = gen.term(6, 0, {"c", "d"});  // x not free in b
    // t[x:=a][y:=b] == t[y:=b][x:=a[y:=b]] when x not free in b and x != y
    TermPtr lhs = substitute(substitute(t, "x", a), "y", b);
    TermPtr rhs = substitute(substitute(t, "y", b), "x", substitute(a, "y", b));
    CHECK(alpha_eq(lhs, rhs));
    ++done;
  }
  CHECK(done == 300);
}

TEST_CASE("church and combinators") {
  CHECK(alpha_eq(church(0), parse_term("\\f x. x")));
  CHECK(alpha_eq(church(3), parse_term("\\f x. (f (f (f x)))")));

  RuleSet rules;
  Fuel fuel;
  // (Suc c1) |>* c2
  TermPtr suc1 = Term::app(combinators().Suc, church(1));
  ReduceResult r = reduce(suc1, Strategy::Leftmost, rules, fuel);
  CHECK(r.status == ReduceResult::Status::NormalForm);
  CHECK(alpha_eq(r.trace.end, church(2)));

  // (Y f) head-reduces to (f (Y' f)) with (Y' f) joining (Y f)
  TermPtr yf = Term::app(combinators().Y, Term::fvar("f"));
  HeadOutcome ho = head_reduce(yf, rules, fuel);
  REQUIRE(ho.kind == HeadOutcome::Kind::Hnf);
  CHECK(ho.binders == 0);
  CHECK(ho.head->name == "f");
  REQUIRE(ho.args.size() == 1);
  auto meet = joinable(ho.args[0], yf, rules);
  CHECK(meet.has_value());
}

TEST_CASE("alpha equality and code") {
  CHECK(alpha_eq(parse_term("\\x.x"), parse_term("\\y.y")));
  CHECK(!alpha_eq(parse_term("\\x.\\y.x"), parse_term("\\x.\\y.y")));
  CHECK(term_code(parse_term("\\x.x")) == term_code(parse_term("\\y.y")));
  CHECK(term_code(parse0("Omega")) == term_code(parse0("(delta delta)")));
  CHECK(term_code(Term::fvar("a")) != term_code(Term::fvar("b")));
  // stable across runs: frozen encoding of \f x.(f (f x))
  CHECK(term_code(church(2)) == "LLAB1;AB1;B0;");
  // code equality coincides with alpha equality on random pairs
  testutil::Gen gen(77);
  for (int i = 0; i < 200; ++i) {
    TermPtr t = gen.term(16, 0, {"a", "nu"});
    TermPtr s = gen.term(16, 0, {"a", "nu"});
    CHECK(alpha_eq(t, s) == (term_code(t) == term_code(s)));
    CHECK(term_code(t) == term_code(freshen_binders(t)));
  }
}

TEST_CASE("print/parse round trip") {
  testutil::Gen gen(42);
  for (int i = 0; i < 500; ++i) {
    TermPtr t = gen.term(30, 0, {"a", "b", "nu"});
    TermPtr back = parse_term(print_term(t));
    CHECK(alpha_eq(t, back));
  }
}

TEST_CASE("paths") {
  TermPtr t = parse_term("(u a b c)");
  CHECK(path_str(path_of_str("LLR")) == "LLR");
  CHECK(subterm_at(t, path_of_str("LLR"))->name == "a");
  CHECK(subterm_at(t, path_of_str("R"))->name == "c");
  CHECK_THROWS_AS(subterm_at(t, path_of_str("A")), InvalidPathError);
  TermPtr r = replace_at(t, path_of_str("LLR"), Term::fvar("z"));
  CHECK(alpha_eq(r, parse_term("(u z b c)")));
}

TEST_CASE("term size cap") {
  size_t old = max_term_size();
  set_max_term_size(50);
  CHECK_THROWS_AS(
      [] {
        TermPtr t = Term::fvar("a");
        for (int i = 0; i < 60; ++i) t = Term::app(t, Term::fvar("b"));
        return t;
      }(),
      TermSizeError);
  set_max_term_size(old);
}

TEST_CASE("corpus file parsing and rules") {
  std::string text =
      "# sample\n"
      "F = (G x)\n"
      "const Gamma/2\n"
      "const J/2 -> \\a u. \\y1 y2. (u (J a y1) (J a y2))\n"
      "A = I\n";
  CorpusFile cf = parse_corpus_text(text);
  CHECK(cf.defs.count("F") == 1);
  CHECK(alpha_eq(cf.defs.at("A"), combinators().I));
  REQUIRE(cf.rules.has("J"));
  CHECK(cf.rules.find("J")->arity == 2);
  CHECK(cf.rules.find("Gamma")->body == nullptr);

  // rule fires with exactly arity arguments
  auto fired = cf.rules.fire("J", {Term::fvar("nu"), combinators().I});
  REQUIRE(fired.has_value());
  TermPtr expect = parse_term("\\y1 y2. (I (J nu y1) (J nu y2))", cf.rules,
                              Definitions{{"I", combinators().I}});
  CHECK(alpha_eq(*fired, expect));
  // inert constants do not fire
  CHECK(!cf.rules.fire("Gamma", {Term::fvar("a"), Term::fvar("b")}).has_value());
}

TEST_CASE("open_to_named uses stable binder names") {
  TermPtr t = parse0("\\z.(z (\\y. (x (K y))))");
  NamingTable names;
  TermPtr sub = open_to_named(t, path_of_str("ARA"), names);
  CHECK(free_names(sub) == std::vector<std::string>{"x", "y"});
  TermPtr sub2 = open_to_named(t, path_of_str("ARA"), names);
  CHECK(alpha_eq(sub, sub2));
}
