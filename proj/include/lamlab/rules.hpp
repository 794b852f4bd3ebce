#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamlab/term.hpp"

namespace lamlab {

struct RuleOverrunError : std::runtime_error {
  explicit RuleOverrunError(const std::string& c)
      : std::runtime_error("constant " + c + " fired past its recorded family levels") {}
};

// Rewrite rule for a declared constant. The template body sits under `arity`
// pending binders (parameters left to right); firing opens them with the
// spine arguments. A declared constant without a template is inert.
struct Rule {
  uint32_t arity = 0;
  TermPtr body;               // null = inert
  bool overrun_error = false; // fully applied without template is a hard error
  bool j_like = false;        // participates in (J nu) checks and the E grammar
};

class RuleSet {
 public:
  void declare(std::string name, Rule r);
  bool has(const std::string& name) const { return rules_.count(name) != 0; }
  const Rule* find(const std::string& name) const;
  const std::map<std::string, Rule>& all() const { return rules_; }
  std::vector<std::string> j_like_names() const;

  // Fires `name` on exactly arity args; null for inert, throws on overrun.
  std::optional<TermPtr> fire(const std::string& name, const std::vector<TermPtr>& args) const;

 private:
  std::map<std::string, Rule> rules_;
};

}  // namespace lamlab
