#pragma once

#include <map>
#include <string>
#include <vector>

#include "lamlab/rules.hpp"
#include "lamlab/term.hpp"

namespace lamlab {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) +
                           ": " + msg),
        line(l),
        col(c) {}
};

// Named definitions are inlined at parse time; identifiers resolve in order
// bound variable > definition > declared constant > free variable.
using Definitions = std::map<std::string, TermPtr>;

TermPtr parse_term(const std::string& src, const RuleSet& rules = {},
                   const Definitions& defs = {});

// A corpus file: `name = term` definitions and `const Name/arity -> template`
// rule declarations (template's leading binders are the parameters; omit the
// arrow for an inert constant), one per line, `#` comments.
struct CorpusFile {
  Definitions defs;   // includes the built-in prelude
  RuleSet rules;
};

// Prelude definitions every corpus file starts from (I, K, delta, Omega, Suc, Y).
Definitions prelude();

CorpusFile parse_corpus_text(const std::string& text, const std::string& where = "<corpus>");
CorpusFile load_corpus_file(const std::string& path);

}  // namespace lamlab
