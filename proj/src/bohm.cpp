#include "lamlab/bohm.hpp"

namespace lamlab {

namespace {

BohmPrefix prefix_rec(const TermPtr& t, uint32_t depth, uint32_t ctx, const RuleSet& rules,
                      const Fuel& fuel) {
  BohmPrefix node;
  if (depth == 0) {
    node.tag = BohmPrefix::Tag::Cut;
    return node;
  }
  HeadOutcome ho = head_reduce(t, rules, fuel);
  switch (ho.kind) {
    case HeadOutcome::Kind::CycleCertified: node.tag = BohmPrefix::Tag::Bottom; return node;
    case HeadOutcome::Kind::FuelExhausted: node.tag = BohmPrefix::Tag::Unknown; return node;
    case HeadOutcome::Kind::Hnf: break;
  }
  node.tag = BohmPrefix::Tag::Node;
  node.binders = ho.binders;
  uint32_t total = ctx + ho.binders;
  switch (ho.head->kind) {
    case Kind::BoundVar:
      if (ho.head->index < total) {
        node.head_kind = BohmPrefix::HeadKind::Bound;
        node.head_level = static_cast<int64_t>(total) - 1 - ho.head->index;
      } else {
        // dangling beyond the prefix root: identify by offset
        node.head_kind = BohmPrefix::HeadKind::Free;
        node.head_name = "_up" + std::to_string(ho.head->index - total);
      }
      break;
    case Kind::FreeVar:
      node.head_kind = BohmPrefix::HeadKind::Free;
      node.head_name = ho.head->name;
      break;
    case Kind::Const:
      node.head_kind = BohmPrefix::HeadKind::Const;
      node.head_name = ho.head->name;
      break;
    default: break;
  }
  node.children.reserve(ho.args.size());
  for (const TermPtr& a : ho.args)
    node.children.push_back(prefix_rec(a, depth - 1, total, rules, fuel));
  return node;
}

struct Cmp {
  HEqual out;

  bool rec(const BohmPrefix& a, const BohmPrefix& b, std::vector<size_t>& path) {
    using Tag = BohmPrefix::Tag;
    if (a.tag == Tag::Cut || b.tag == Tag::Cut) return true;  // depth boundary
    if (a.tag == Tag::Unknown || b.tag == Tag::Unknown) {
      out.verdict = HEqual::Verdict::Unknown;
      return true;
    }
    if (a.tag == Tag::Bottom && b.tag == Tag::Bottom) return true;
    if (a.tag != b.tag) {
      out.verdict = HEqual::Verdict::Distinct;
      out.witness = path;
      out.detail = "certified bottom vs certified head normal form";
      return false;
    }
    // both Node
    if (a.binders != b.binders || a.head_kind != b.head_kind ||
        a.head_level != b.head_level || a.head_name != b.head_name ||
        a.children.size() != b.children.size()) {
      out.verdict = HEqual::Verdict::Distinct;
      out.witness = path;
      out.detail = "head normal forms differ in binders, head or argument count";
      return false;
    }
    for (size_t i = 0; i < a.children.size(); ++i) {
      path.push_back(i);
      if (!rec(a.children[i], b.children[i], path)) return false;
      path.pop_back();
    }
    return true;
  }
};

}  // namespace

BohmPrefix bohm_prefix(const TermPtr& t, uint32_t depth, const RuleSet& rules,
                       const Fuel& fuel) {
  return prefix_rec(t, std::min(depth, fuel.max_depth), 0, rules, fuel);
}

HEqual h_equal_bounded(const TermPtr& t1, const TermPtr& t2, uint32_t depth,
                       const RuleSet& rules, const Fuel& fuel) {
  BohmPrefix p1 = bohm_prefix(t1, depth, rules, fuel);
  BohmPrefix p2 = bohm_prefix(t2, depth, rules, fuel);
  Cmp cmp;
  cmp.out.verdict = HEqual::Verdict::AgreeToDepth;
  std::vector<size_t> path;
  cmp.rec(p1, p2, path);
  return cmp.out;
}

}  // namespace lamlab
