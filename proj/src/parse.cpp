#include "lamlab/parse.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace lamlab {

namespace {

struct Token {
  enum Type { Lambda, Dot, LParen, RParen, Ident, End } type;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  Lexer(const std::string& src, int line0 = 1) : src_(src), line_(line0) {}

  Token next() {
    skip_ws();
    int l = line_, c = col_;
    if (pos_ >= src_.size()) return {Token::End, "", l, c};
    char ch = src_[pos_];
    if (ch == '\\') {
      advance();
      return {Token::Lambda, "\\", l, c};
    }
    // UTF-8 lambda
    if (static_cast<unsigned char>(ch) == 0xCE && pos_ + 1 < src_.size() &&
        static_cast<unsigned char>(src_[pos_ + 1]) == 0xBB) {
      advance();
      advance();
      return {Token::Lambda, "λ", l, c};
    }
    if (ch == '.') {
      advance();
      return {Token::Dot, ".", l, c};
    }
    if (ch == '(') {
      advance();
      return {Token::LParen, "(", l, c};
    }
    if (ch == ')') {
      advance();
      return {Token::RParen, ")", l, c};
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string id;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'') {
          id.push_back(d);
          advance();
        } else {
          break;
        }
      }
      return {Token::Ident, id, l, c};
    }
    throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& src, const RuleSet& rules, const Definitions& defs, int line0 = 1)
      : lex_(src, line0), rules_(rules), defs_(defs) {
    cur_ = lex_.next();
  }

  TermPtr parse_whole() {
    TermPtr t = parse_term();
    expect(Token::End, "end of input");
    return t;
  }

 private:
  TermPtr parse_term() {
    if (cur_.type == Token::Lambda) {
      eat();
      std::vector<std::string> binders;
      while (cur_.type == Token::Ident) {
        binders.push_back(cur_.text);
        eat();
      }
      if (binders.empty()) throw ParseError(cur_.line, cur_.col, "expected binder name");
      expect(Token::Dot, "'.'");
      for (const auto& b : binders) scope_.push_back(b);
      TermPtr body = parse_term();
      for (size_t i = binders.size(); i-- > 0;) {
        scope_.pop_back();
        body = Term::lam(body, binders[i]);
      }
      return body;
    }
    // application: one or more atoms, left associative
    TermPtr t = parse_atom();
    while (cur_.type == Token::Ident || cur_.type == Token::LParen ||
           cur_.type == Token::Lambda) {
      // lambda as a bare argument only makes sense parenthesized, but accept
      // it trailing: \x.x y parses as \x.(x y) via recursion above, so only
      // idents and parens extend an application here.
      if (cur_.type == Token::Lambda) break;
      t = Term::app(t, parse_atom());
    }
    return t;
  }

  TermPtr parse_atom() {
    if (cur_.type == Token::LParen) {
      eat();
      TermPtr t = parse_term();
      expect(Token::RParen, "')'");
      return t;
    }
    if (cur_.type == Token::Ident) {
      std::string id = cur_.text;
      eat();
      for (size_t i = scope_.size(); i-- > 0;) {
        if (scope_[i] == id) return Term::bvar(static_cast<uint32_t>(scope_.size() - 1 - i));
      }
      auto def = defs_.find(id);
      if (def != defs_.end()) return def->second;
      if (rules_.has(id)) return Term::cnst(id);
      return Term::fvar(id);
    }
    throw ParseError(cur_.line, cur_.col, "expected a term, got '" + cur_.text + "'");
  }

  void expect(Token::Type t, const std::string& what) {
    if (cur_.type != t)
      throw ParseError(cur_.line, cur_.col, "expected " + what + ", got '" + cur_.text + "'");
    if (t != Token::End) eat();
  }
  void eat() { cur_ = lex_.next(); }

  Lexer lex_;
  Token cur_;
  const RuleSet& rules_;
  const Definitions& defs_;
  std::vector<std::string> scope_;
};

}  // namespace

TermPtr parse_term(const std::string& src, const RuleSet& rules, const Definitions& defs) {
  Parser p(src, rules, defs);
  return p.parse_whole();
}

Definitions prelude() {
  static const Definitions defs = [] {
    const Combinators& c = combinators();
    Definitions d;
    d["I"] = c.I;
    d["K"] = c.K;
    d["delta"] = c.delta;
    d["Omega"] = c.Omega;
    d["Suc"] = c.Suc;
    d["Y"] = c.Y;
    return d;
  }();
  return defs;
}

namespace {
std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}
}  // namespace

CorpusFile parse_corpus_text(const std::string& text, const std::string& where) {
  CorpusFile out;
  out.defs = prelude();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (!stripped.empty() && stripped[0] == '#') continue;
    if (stripped.empty()) continue;
    if (stripped.rfind("const ", 0) == 0) {
      // const Name/arity -> template   (arrow omitted: inert constant)
      std::string rest = trim(stripped.substr(6));
      size_t slash = rest.find('/');
      if (slash == std::string::npos)
        throw ParseError(lineno, 1, where + ": const declaration needs Name/arity");
      std::string cname = trim(rest.substr(0, slash));
      std::string after = rest.substr(slash + 1);
      size_t arrow = after.find("->");
      std::string arity_s = trim(arrow == std::string::npos ? after : after.substr(0, arrow));
      uint32_t arity = static_cast<uint32_t>(std::stoul(arity_s));
      Rule r;
      r.arity = arity;
      if (arrow != std::string::npos) {
        std::string tmpl_src = trim(after.substr(arrow + 2));
        // the constant may appear in its own template
        if (!out.rules.has(cname)) out.rules.declare(cname, Rule{arity, nullptr, false, false});
        Parser p(tmpl_src, out.rules, out.defs, lineno);
        TermPtr tmpl = p.parse_whole();
        // leading binders are the parameters
        TermPtr body = tmpl;
        for (uint32_t i = 0; i < arity; ++i) {
          if (!body->is(Kind::Abs))
            throw ParseError(lineno, 1,
                             where + ": template for " + cname + " must bind " +
                                 std::to_string(arity) + " parameters");
          body = body->body();
        }
        if (!free_names(body).empty())
          throw ParseError(lineno, 1,
                           where + ": template for " + cname +
                               " may only use its parameters and declared constants");
        r.body = body;
      }
      out.rules.declare(cname, r);
      continue;
    }
    size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, 1, where + ": expected `name = term` or `const ...`");
    std::string name = trim(stripped.substr(0, eq));
    std::string rhs = trim(stripped.substr(eq + 1));
    if (name.empty() || rhs.empty())
      throw ParseError(lineno, 1, where + ": malformed definition");
    Parser p(rhs, out.rules, out.defs, lineno);
    out.defs[name] = p.parse_whole();
  }
  return out;
}

CorpusFile load_corpus_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open corpus file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_corpus_text(ss.str(), path);
}

}  // namespace lamlab
