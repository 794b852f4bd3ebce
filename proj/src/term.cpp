#include "lamlab/term.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <set>
#include <sstream>

namespace lamlab {

namespace {
std::atomic<size_t> g_max_term_size{1000000};
std::atomic<uint32_t> g_next_binder_id{1};
}  // namespace

size_t max_term_size() { return g_max_term_size.load(); }
void set_max_term_size(size_t n) { g_max_term_size.store(n); }

TermPtr Term::finish(Term t) {
  if (t.size > g_max_term_size.load()) throw TermSizeError(t.size);
  return std::make_shared<const Term>(std::move(t));
}

TermPtr Term::bvar(uint32_t i) {
  Term t;
  t.kind = Kind::BoundVar;
  t.index = i;
  return finish(std::move(t));
}

TermPtr Term::fvar(std::string n) {
  Term t;
  t.kind = Kind::FreeVar;
  t.name = std::move(n);
  return finish(std::move(t));
}

TermPtr Term::cnst(std::string n) {
  Term t;
  t.kind = Kind::Const;
  t.name = std::move(n);
  return finish(std::move(t));
}

TermPtr Term::lam(TermPtr body, std::string hint) {
  return lam_keep(std::move(body), g_next_binder_id.fetch_add(1), std::move(hint));
}

TermPtr Term::lam_keep(TermPtr body, uint32_t id, std::string hint) {
  Term t;
  t.kind = Kind::Abs;
  t.size = 1 + body->size;
  t.sub1 = std::move(body);
  t.binder_id = id;
  t.name = std::move(hint);
  return finish(std::move(t));
}

TermPtr Term::app(TermPtr f, TermPtr a) {
  Term t;
  t.kind = Kind::App;
  t.size = 1 + f->size + a->size;
  t.sub1 = std::move(f);
  t.sub2 = std::move(a);
  return finish(std::move(t));
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->size != b->size) return false;
  switch (a->kind) {
    case Kind::BoundVar: return a->index == b->index;
    case Kind::FreeVar:
    case Kind::Const: return a->name == b->name;
    case Kind::Abs: return alpha_eq(a->sub1, b->sub1);
    case Kind::App: return alpha_eq(a->sub1, b->sub1) && alpha_eq(a->sub2, b->sub2);
  }
  return false;
}

namespace {
void code_rec(const TermPtr& t, std::string& out) {
  switch (t->kind) {
    case Kind::BoundVar:
      out.push_back('B');
      out.append(std::to_string(t->index));
      out.push_back(';');
      break;
    case Kind::FreeVar:
      out.push_back('F');
      out.append(std::to_string(t->name.size()));
      out.push_back(':');
      out.append(t->name);
      break;
    case Kind::Const:
      out.push_back('C');
      out.append(std::to_string(t->name.size()));
      out.push_back(':');
      out.append(t->name);
      break;
    case Kind::Abs:
      out.push_back('L');
      code_rec(t->sub1, out);
      break;
    case Kind::App:
      out.push_back('A');
      code_rec(t->sub1, out);
      code_rec(t->sub2, out);
      break;
  }
}
}  // namespace

std::string term_code(const TermPtr& t) {
  std::string out;
  out.reserve(t->size * 3);
  code_rec(t, out);
  return out;
}

std::string path_str(const Path& p) {
  std::string s;
  s.reserve(p.size());
  for (Step st : p)
    s.push_back(st == Step::Fun ? 'L' : (st == Step::Arg ? 'R' : 'A'));
  return s;
}

Path path_of_str(const std::string& s) {
  Path p;
  p.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case 'L': p.push_back(Step::Fun); break;
      case 'R': p.push_back(Step::Arg); break;
      case 'A': p.push_back(Step::Body); break;
      default: throw InvalidPathError(std::string("bad path character '") + c + "'");
    }
  }
  return p;
}

TermPtr subterm_at(const TermPtr& t, const Path& p) {
  TermPtr cur = t;
  for (Step st : p) {
    switch (st) {
      case Step::Fun:
        if (!cur->is(Kind::App)) throw InvalidPathError("L step on non-application");
        cur = cur->sub1;
        break;
      case Step::Arg:
        if (!cur->is(Kind::App)) throw InvalidPathError("R step on non-application");
        cur = cur->sub2;
        break;
      case Step::Body:
        if (!cur->is(Kind::Abs)) throw InvalidPathError("A step on non-abstraction");
        cur = cur->sub1;
        break;
    }
  }
  return cur;
}

namespace {
TermPtr replace_rec(const TermPtr& t, const Path& p, size_t i, const TermPtr& s) {
  if (i == p.size()) return s;
  switch (p[i]) {
    case Step::Fun:
      if (!t->is(Kind::App)) throw InvalidPathError("L step on non-application");
      return Term::app(replace_rec(t->sub1, p, i + 1, s), t->sub2);
    case Step::Arg:
      if (!t->is(Kind::App)) throw InvalidPathError("R step on non-application");
      return Term::app(t->sub1, replace_rec(t->sub2, p, i + 1, s));
    case Step::Body:
      if (!t->is(Kind::Abs)) throw InvalidPathError("A step on non-abstraction");
      return Term::lam_keep(replace_rec(t->sub1, p, i + 1, s), t->binder_id, t->name);
  }
  throw InvalidPathError("unreachable");
}
}  // namespace

TermPtr replace_at(const TermPtr& t, const Path& p, const TermPtr& s) {
  return replace_rec(t, p, 0, s);
}

TermPtr shift(const TermPtr& t, int32_t by, uint32_t cutoff) {
  if (by == 0) return t;
  switch (t->kind) {
    case Kind::BoundVar:
      if (t->index < cutoff) return t;
      return Term::bvar(static_cast<uint32_t>(static_cast<int64_t>(t->index) + by));
    case Kind::FreeVar:
    case Kind::Const: return t;
    case Kind::Abs: {
      TermPtr b = shift(t->sub1, by, cutoff + 1);
      if (b.get() == t->sub1.get()) return t;
      return Term::lam_keep(b, t->binder_id, t->name);
    }
    case Kind::App: {
      TermPtr f = shift(t->sub1, by, cutoff);
      TermPtr a = shift(t->sub2, by, cutoff);
      if (f.get() == t->sub1.get() && a.get() == t->sub2.get()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}

TermPtr freshen_binders(const TermPtr& t) {
  switch (t->kind) {
    case Kind::BoundVar:
    case Kind::FreeVar:
    case Kind::Const: return t;
    case Kind::Abs: return Term::lam(freshen_binders(t->sub1), t->name);
    case Kind::App: return Term::app(freshen_binders(t->sub1), freshen_binders(t->sub2));
  }
  return t;
}

namespace {
// Replace index `depth` by arg (shifted), decrement indices above. The first
// inserted copy keeps its binder ids (it continues the same instance);
// further copies are freshened so two live binders never share an id.
TermPtr open_rec(const TermPtr& t, const TermPtr& arg, uint32_t depth, bool& first) {
  switch (t->kind) {
    case Kind::BoundVar:
      if (t->index == depth) {
        TermPtr ins = shift(arg, static_cast<int32_t>(depth));
        if (first) {
          first = false;
          return ins;
        }
        return freshen_binders(ins);
      }
      if (t->index > depth) return Term::bvar(t->index - 1);
      return t;
    case Kind::FreeVar:
    case Kind::Const: return t;
    case Kind::Abs: {
      TermPtr b = open_rec(t->sub1, arg, depth + 1, first);
      if (b.get() == t->sub1.get()) return t;
      return Term::lam_keep(b, t->binder_id, t->name);
    }
    case Kind::App: {
      TermPtr f = open_rec(t->sub1, arg, depth, first);
      TermPtr a = open_rec(t->sub2, arg, depth, first);
      if (f.get() == t->sub1.get() && a.get() == t->sub2.get()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}
}  // namespace

TermPtr beta_open(const TermPtr& body, const TermPtr& arg) {
  bool first = true;
  return open_rec(body, arg, 0, first);
}

namespace {
// Simultaneous opening: sequential beta_open would conflate dangling indices
// of an already-inserted argument with the remaining parameter indices.
TermPtr open_all_rec(const TermPtr& t, const std::vector<TermPtr>& args, uint32_t depth,
                     std::vector<bool>& first) {
  uint32_t n = static_cast<uint32_t>(args.size());
  switch (t->kind) {
    case Kind::BoundVar: {
      if (t->index < depth) return t;
      uint32_t up = t->index - depth;
      if (up < n) {
        size_t j = n - 1 - up;  // innermost pending binder is the last argument
        TermPtr ins = shift(args[j], static_cast<int32_t>(depth));
        if (first[j]) {
          first[j] = false;
          return ins;
        }
        return freshen_binders(ins);
      }
      return Term::bvar(t->index - n);
    }
    case Kind::FreeVar:
    case Kind::Const: return t;
    case Kind::Abs: {
      TermPtr b = open_all_rec(t->sub1, args, depth + 1, first);
      if (b.get() == t->sub1.get()) return t;
      return Term::lam_keep(b, t->binder_id, t->name);
    }
    case Kind::App: {
      TermPtr f = open_all_rec(t->sub1, args, depth, first);
      TermPtr a = open_all_rec(t->sub2, args, depth, first);
      if (f.get() == t->sub1.get() && a.get() == t->sub2.get()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}
}  // namespace

TermPtr open_binders(const TermPtr& body, const std::vector<TermPtr>& args) {
  if (args.empty()) return body;
  std::vector<bool> first(args.size(), true);
  return open_all_rec(body, args, 0, first);
}

namespace {
TermPtr subst_rec(const TermPtr& t, const std::string& x, const TermPtr& s, bool& first) {
  switch (t->kind) {
    case Kind::BoundVar:
    case Kind::Const: return t;
    case Kind::FreeVar:
      if (t->name != x) return t;
      if (first) {
        first = false;
        return s;
      }
      return freshen_binders(s);
    case Kind::Abs: {
      TermPtr b = subst_rec(t->sub1, x, s, first);
      if (b.get() == t->sub1.get()) return t;
      return Term::lam_keep(b, t->binder_id, t->name);
    }
    case Kind::App: {
      TermPtr f = subst_rec(t->sub1, x, s, first);
      TermPtr a = subst_rec(t->sub2, x, s, first);
      if (f.get() == t->sub1.get() && a.get() == t->sub2.get()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}
}  // namespace

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& s) {
  bool first = true;
  return subst_rec(t, x, s, first);
}

namespace {
TermPtr apply_subst_rec(const TermPtr& t, const SubstMap& sigma,
                        std::set<std::string>& inserted) {
  switch (t->kind) {
    case Kind::BoundVar:
    case Kind::Const: return t;
    case Kind::FreeVar: {
      auto it = sigma.find(t->name);
      if (it == sigma.end()) return t;
      if (inserted.insert(t->name).second) return it->second;
      return freshen_binders(it->second);
    }
    case Kind::Abs: {
      TermPtr b = apply_subst_rec(t->sub1, sigma, inserted);
      if (b.get() == t->sub1.get()) return t;
      return Term::lam_keep(b, t->binder_id, t->name);
    }
    case Kind::App: {
      TermPtr f = apply_subst_rec(t->sub1, sigma, inserted);
      TermPtr a = apply_subst_rec(t->sub2, sigma, inserted);
      if (f.get() == t->sub1.get() && a.get() == t->sub2.get()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}
}  // namespace

TermPtr apply_subst(const TermPtr& t, const SubstMap& sigma) {
  if (sigma.empty()) return t;
  std::set<std::string> inserted;
  return apply_subst_rec(t, sigma, inserted);
}

namespace {
bool dangling_rec(const TermPtr& t, uint32_t depth) {
  switch (t->kind) {
    case Kind::BoundVar: return t->index >= depth;
    case Kind::FreeVar:
    case Kind::Const: return false;
    case Kind::Abs: return dangling_rec(t->sub1, depth + 1);
    case Kind::App: return dangling_rec(t->sub1, depth) || dangling_rec(t->sub2, depth);
  }
  return false;
}

void free_names_rec(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Kind::FreeVar: out.insert(t->name); break;
    case Kind::Abs: free_names_rec(t->sub1, out); break;
    case Kind::App:
      free_names_rec(t->sub1, out);
      free_names_rec(t->sub2, out);
      break;
    default: break;
  }
}
}  // namespace

bool has_dangling(const TermPtr& t) { return dangling_rec(t, 0); }

std::vector<std::string> free_names(const TermPtr& t) {
  std::set<std::string> s;
  free_names_rec(t, s);
  return {s.begin(), s.end()};
}

bool contains_free(const TermPtr& t, const std::string& x) {
  switch (t->kind) {
    case Kind::FreeVar: return t->name == x;
    case Kind::Abs: return contains_free(t->sub1, x);
    case Kind::App: return contains_free(t->sub1, x) || contains_free(t->sub2, x);
    default: return false;
  }
}

bool contains_const(const TermPtr& t, const std::string& c) {
  switch (t->kind) {
    case Kind::Const: return t->name == c;
    case Kind::Abs: return contains_const(t->sub1, c);
    case Kind::App: return contains_const(t->sub1, c) || contains_const(t->sub2, c);
    default: return false;
  }
}

namespace {
void occ_rec(const TermPtr& t, const std::string& x, Path& cur, std::vector<Path>& out) {
  switch (t->kind) {
    case Kind::FreeVar:
      if (t->name == x) out.push_back(cur);
      break;
    case Kind::Abs:
      cur.push_back(Step::Body);
      occ_rec(t->sub1, x, cur, out);
      cur.pop_back();
      break;
    case Kind::App:
      cur.push_back(Step::Fun);
      occ_rec(t->sub1, x, cur, out);
      cur.pop_back();
      cur.push_back(Step::Arg);
      occ_rec(t->sub2, x, cur, out);
      cur.pop_back();
      break;
    default: break;
  }
}
}  // namespace

std::vector<Path> occurrence_paths(const TermPtr& t, const std::string& x) {
  std::vector<Path> out;
  Path cur;
  occ_rec(t, x, cur, out);
  return out;
}

namespace {
TermPtr close_rec(const TermPtr& t, const std::vector<std::string>& names, uint32_t depth) {
  switch (t->kind) {
    case Kind::BoundVar:
      if (t->index >= depth)
        return Term::bvar(t->index + static_cast<uint32_t>(names.size()));
      return t;
    case Kind::Const: return t;
    case Kind::FreeVar: {
      for (size_t i = 0; i < names.size(); ++i) {
        if (t->name == names[i]) {
          // innermost name (last) gets index `depth`
          return Term::bvar(depth + static_cast<uint32_t>(names.size() - 1 - i));
        }
      }
      return t;
    }
    case Kind::Abs: {
      TermPtr b = close_rec(t->sub1, names, depth + 1);
      if (b.get() == t->sub1.get()) return t;
      return Term::lam_keep(b, t->binder_id, t->name);
    }
    case Kind::App: {
      TermPtr f = close_rec(t->sub1, names, depth);
      TermPtr a = close_rec(t->sub2, names, depth);
      if (f.get() == t->sub1.get() && a.get() == t->sub2.get()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}
}  // namespace

TermPtr close_named_body(const TermPtr& t, const std::vector<std::string>& names) {
  return close_rec(t, names, 0);
}

TermPtr abs_named(const TermPtr& t, const std::vector<std::string>& names) {
  TermPtr body = close_named_body(t, names);
  for (size_t i = names.size(); i-- > 0;) body = Term::lam(body, names[i]);
  return body;
}

const std::string& NamingTable::name_for(uint32_t binder_id, const std::string& hint) {
  auto it = by_id_.find(binder_id);
  if (it != by_id_.end()) return it->second;
  std::string base = hint.empty() ? "v" : hint;
  std::string candidate = base;
  while (taken_.count(candidate)) candidate += "'";
  taken_[candidate] = binder_id;
  return by_id_.emplace(binder_id, candidate).first->second;
}

namespace {
TermPtr name_dangling(const TermPtr& t, uint32_t depth,
                      const std::vector<std::pair<uint32_t, std::string>>& stack,
                      NamingTable& names) {
  switch (t->kind) {
    case Kind::BoundVar: {
      if (t->index < depth) return t;
      uint32_t up = t->index - depth;  // 0 = innermost enclosing binder above the cut
      if (up >= stack.size())
        throw InvalidPathError("dangling index escapes the whole term");
      const auto& [id, hint] = stack[stack.size() - 1 - up];
      return Term::fvar(names.name_for(id, hint));
    }
    case Kind::FreeVar:
    case Kind::Const: return t;
    case Kind::Abs: {
      TermPtr b = name_dangling(t->sub1, depth + 1, stack, names);
      if (b.get() == t->sub1.get()) return t;
      return Term::lam_keep(b, t->binder_id, t->name);
    }
    case Kind::App: {
      TermPtr f = name_dangling(t->sub1, depth, stack, names);
      TermPtr a = name_dangling(t->sub2, depth, stack, names);
      if (f.get() == t->sub1.get() && a.get() == t->sub2.get()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}
}  // namespace

TermPtr open_to_named(const TermPtr& root, const Path& p, NamingTable& names) {
  std::vector<std::pair<uint32_t, std::string>> stack;  // outermost first
  TermPtr cur = root;
  for (Step st : p) {
    if (st == Step::Body) {
      if (!cur->is(Kind::Abs)) throw InvalidPathError("A step on non-abstraction");
      stack.emplace_back(cur->binder_id, cur->name);
      cur = cur->sub1;
    } else {
      if (!cur->is(Kind::App)) throw InvalidPathError("app step on non-application");
      cur = st == Step::Fun ? cur->sub1 : cur->sub2;
    }
  }
  return name_dangling(cur, 0, stack, names);
}

Spine spine_of(const TermPtr& t) {
  Spine s;
  std::vector<TermPtr> rev;
  TermPtr cur = t;
  while (cur->is(Kind::App)) {
    rev.push_back(cur->sub2);
    cur = cur->sub1;
  }
  s.head = cur;
  s.args.assign(rev.rbegin(), rev.rend());
  return s;
}

TermPtr app_spine(TermPtr head, const std::vector<TermPtr>& args) {
  TermPtr cur = std::move(head);
  for (const auto& a : args) cur = Term::app(cur, a);
  return cur;
}

Path spine_arg_path(const Path& at, size_t n_args, size_t j) {
  Path p = at;
  for (size_t i = 0; i + j + 1 < n_args; ++i) p.push_back(Step::Fun);
  p.push_back(Step::Arg);
  return p;
}

namespace {
Combinators make_combinators() {
  Combinators c;
  using T = Term;
  c.I = T::lam(T::bvar(0), "x");
  c.K = T::lam(T::lam(T::bvar(1), "y"), "x");
  c.delta = T::lam(T::app(T::bvar(0), T::bvar(0)), "x");
  c.Omega = T::app(c.delta, c.delta);
  // Suc = \n f x. (f (n f x))
  c.Suc = T::lam(
      T::lam(T::lam(T::app(T::bvar(1), T::app(T::app(T::bvar(2), T::bvar(1)), T::bvar(0))), "x"),
             "f"),
      "n");
  // Turing fixed point: Y = (theta theta), theta = \z f. (f (z z f))
  TermPtr theta = T::lam(
      T::lam(T::app(T::bvar(0), T::app(T::app(T::bvar(1), T::bvar(1)), T::bvar(0))), "f"), "z");
  c.Y = T::app(theta, theta);
  return c;
}
}  // namespace

const Combinators& combinators() {
  static const Combinators c = make_combinators();
  return c;
}

TermPtr church(uint32_t n) {
  TermPtr body = Term::bvar(0);
  for (uint32_t i = 0; i < n; ++i) body = Term::app(Term::bvar(1), body);
  return Term::lam(Term::lam(body, "x"), "f");
}

// Printing ----------------------------------------------------------------

namespace {
std::string fresh_print_name(const std::string& hint, const std::set<std::string>& avoid) {
  std::string base = hint.empty() ? "x" : hint;
  std::string candidate = base;
  int tick = 0;
  while (avoid.count(candidate)) {
    candidate = base + std::string(static_cast<size_t>(++tick), '\'');
  }
  return candidate;
}

void print_rec(const TermPtr& t, std::vector<std::string>& env, std::set<std::string>& avoid,
               std::string& out, bool parens_lam) {
  switch (t->kind) {
    case Kind::BoundVar:
      if (t->index < env.size()) {
        out += env[env.size() - 1 - t->index];
      } else {
        out += "_up" + std::to_string(t->index - env.size());
      }
      break;
    case Kind::FreeVar:
    case Kind::Const: out += t->name; break;
    case Kind::Abs: {
      if (parens_lam) out += "(";
      out += "\\";
      // collapse nested binders
      TermPtr cur = t;
      size_t pushed = 0;
      bool first = true;
      while (cur->is(Kind::Abs)) {
        std::string n = fresh_print_name(cur->name, avoid);
        avoid.insert(n);
        env.push_back(n);
        ++pushed;
        if (!first) out += " ";
        out += n;
        first = false;
        cur = cur->sub1;
      }
      out += ". ";
      print_rec(cur, env, avoid, out, false);
      for (size_t i = 0; i < pushed; ++i) {
        avoid.erase(env.back());
        env.pop_back();
      }
      if (parens_lam) out += ")";
      break;
    }
    case Kind::App: {
      Spine s = spine_of(t);
      out += "(";
      print_rec(s.head, env, avoid, out, true);
      for (const auto& a : s.args) {
        out += " ";
        print_rec(a, env, avoid, out, true);
      }
      out += ")";
      break;
    }
  }
}
}  // namespace

std::string print_term(const TermPtr& t) {
  std::vector<std::string> env;
  std::set<std::string> avoid;
  for (const auto& n : free_names(t)) avoid.insert(n);
  std::string out;
  print_rec(t, env, avoid, out, false);
  return out;
}

}  // namespace lamlab
