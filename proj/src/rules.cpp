#include "lamlab/rules.hpp"

namespace lamlab {

void RuleSet::declare(std::string name, Rule r) {
  rules_[std::move(name)] = std::move(r);
}

const Rule* RuleSet::find(const std::string& name) const {
  auto it = rules_.find(name);
  return it == rules_.end() ? nullptr : &it->second;
}

std::vector<std::string> RuleSet::j_like_names() const {
  std::vector<std::string> out;
  for (const auto& [n, r] : rules_)
    if (r.j_like) out.push_back(n);
  return out;
}

std::optional<TermPtr> RuleSet::fire(const std::string& name,
                                     const std::vector<TermPtr>& args) const {
  const Rule* r = find(name);
  if (!r || args.size() != r->arity) return std::nullopt;
  if (!r->body) {
    if (r->overrun_error) throw RuleOverrunError(name);
    return std::nullopt;
  }
  // the stored template persists across firings; its binders must come out
  // fresh every time
  return open_binders(freshen_binders(r->body), args);
}

}  // namespace lamlab
