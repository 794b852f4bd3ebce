#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lamlab {

// Immutable lambda term. Bound variables are de Bruijn indices, free
// variables and rewriting constants are named; the two namespaces are kept
// disjoint by the parser (a name is a constant only when declared).
enum class Kind : uint8_t { BoundVar, FreeVar, Const, Abs, App };

// One navigation step inside a term. Serialized as L (into fun), R (into
// arg), A (into abstraction body).
enum class Step : uint8_t { Fun, Arg, Body };
using Path = std::vector<Step>;

class Term;
using TermPtr = std::shared_ptr<const Term>;

struct TermSizeError : std::runtime_error {
  explicit TermSizeError(size_t sz)
      : std::runtime_error("term size limit exceeded (" + std::to_string(sz) + " nodes)") {}
};

struct InvalidPathError : std::runtime_error {
  explicit InvalidPathError(const std::string& what) : std::runtime_error(what) {}
};

class Term {
 public:
  Kind kind;
  uint32_t index = 0;     // BoundVar
  std::string name;       // FreeVar / Const; on Abs: printable name hint
  uint32_t binder_id = 0; // Abs: stable identity, survives copies through reduction
  TermPtr sub1, sub2;     // Abs: sub1 = body; App: sub1 = fun, sub2 = arg
  size_t size = 1;        // node count, cached

  static TermPtr bvar(uint32_t i);
  static TermPtr fvar(std::string n);
  static TermPtr cnst(std::string n);
  static TermPtr lam(TermPtr body, std::string hint = "");  // mints a fresh binder id
  static TermPtr lam_keep(TermPtr body, uint32_t id, std::string hint);
  static TermPtr app(TermPtr f, TermPtr a);

  bool is(Kind k) const { return kind == k; }
  const TermPtr& body() const { return sub1; }
  const TermPtr& fun() const { return sub1; }
  const TermPtr& arg() const { return sub2; }

 private:
  Term() = default;
  static TermPtr finish(Term t);
};

// Hard cap on constructed term sizes (J-style rules duplicate subterms and
// can explode). Default 10^6 nodes; CLI-overridable.
size_t max_term_size();
void set_max_term_size(size_t n);

bool alpha_eq(const TermPtr& a, const TermPtr& b);
// Canonical byte serialization; equal iff alpha-equivalent, stable across runs.
std::string term_code(const TermPtr& t);

std::string path_str(const Path& p);
Path path_of_str(const std::string& s);

TermPtr subterm_at(const TermPtr& t, const Path& p);
TermPtr replace_at(const TermPtr& t, const Path& p, const TermPtr& s);

// de Bruijn plumbing ------------------------------------------------------

// Shift dangling indices >= cutoff by `by`.
TermPtr shift(const TermPtr& t, int32_t by, uint32_t cutoff = 0);
// Contract one binder: body under one Abs, argument inserted, outer indices fixed.
TermPtr beta_open(const TermPtr& body, const TermPtr& arg);
// Open `n` binders at once: body sits under n Abs nodes, args.size() == n,
// args[i] replaces the i-th binder counted outside-in.
TermPtr open_binders(const TermPtr& body, const std::vector<TermPtr>& args);

// Named free variables ----------------------------------------------------

// Capture-avoiding substitution of a named free variable. `s` must be
// self-contained (no dangling indices), which de Bruijn makes capture-proof.
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& s);
using SubstMap = std::map<std::string, TermPtr>;
TermPtr apply_subst(const TermPtr& t, const SubstMap& sigma);

// Deep copy with fresh binder ids (name hints kept). Substitution inserts
// freshened copies so that two live binders never share an id on one path.
TermPtr freshen_binders(const TermPtr& t);

bool has_dangling(const TermPtr& t);
std::vector<std::string> free_names(const TermPtr& t);
bool contains_free(const TermPtr& t, const std::string& x);
bool contains_const(const TermPtr& t, const std::string& c);
// Paths of all FreeVar(x) leaves, preorder (leftmost-outermost first).
std::vector<Path> occurrence_paths(const TermPtr& t, const std::string& x);

// Abstract named free variables into binders, innermost name last:
// close_named(t, {"a","u"}) has de Bruijn a=1, u=0 under two pending binders.
TermPtr close_named_body(const TermPtr& t, const std::vector<std::string>& names);
// Same but wraps the Abs nodes (leftmost name outermost).
TermPtr abs_named(const TermPtr& t, const std::vector<std::string>& names);

// Session-stable naming of binders when opening subterms. A binder id keeps
// the same name for the whole table lifetime; hint collisions get ticks.
class NamingTable {
 public:
  const std::string& name_for(uint32_t binder_id, const std::string& hint);

 private:
  std::map<uint32_t, std::string> by_id_;
  std::map<std::string, uint32_t> taken_;
};

// Extract the subterm at `p` with dangling indices replaced by stable names
// for the binders crossed on the way down.
TermPtr open_to_named(const TermPtr& root, const Path& p, NamingTable& names);

// Spine helpers -----------------------------------------------------------

struct Spine {
  TermPtr head;                // never an App
  std::vector<TermPtr> args;   // left to right
};
Spine spine_of(const TermPtr& t);
TermPtr app_spine(TermPtr head, const std::vector<TermPtr>& args);
// Path of the j-th spine argument of the term at `at` (0-based, left to right).
Path spine_arg_path(const Path& at, size_t n_args, size_t j);

// Combinators -------------------------------------------------------------

struct Combinators {
  TermPtr I, K, delta, Omega, Suc, Y;
};
const Combinators& combinators();
TermPtr church(uint32_t n);

// Printing ----------------------------------------------------------------

std::string print_term(const TermPtr& t);

}  // namespace lamlab
