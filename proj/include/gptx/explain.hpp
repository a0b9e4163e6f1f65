#pragma once

#include <set>
#include <string>
#include <vector>

#include "gptx/error.hpp"
#include "gptx/factor.hpp"
#include "gptx/trace.hpp"
#include "gptx/tree.hpp"

namespace gptx {

// Answers to "why did you do X?" and "why did you do X instead of F?" as
// sets of explanatory factors. The contrastive variant is a filter on the
// full one: every clause below only shrinks its counterpart, so
// explain_contrastive(x, f) is always a subset of explain_full(x).

namespace detail {

inline int first_occurrence(const Trace& trace, const std::string& id) {
  for (size_t i = 0; i < trace.size(); ++i)
    if (trace[i] == id) return static_cast<int>(i);
  return -1;
}

inline int require_traced_action(const GoalPlanTree& tree, const Trace& trace,
                                 const std::string& x) {
  int idx = tree.index_of(x);
  if (!tree.is_action(idx)) raise(Errc::NotAction, "not an action node: " + x);
  if (first_occurrence(trace, x) < 0) raise(Errc::NotInTrace, "action not in trace: " + x);
  return idx;
}

}  // namespace detail

// Preconditions of the traced action `a` minus those achieved by another
// traced action that necessarily occurs earlier.
inline PropSet filter_pre(const GoalPlanTree& tree, const Trace& trace, const std::string& a) {
  int ai = detail::require_traced_action(tree, trace, a);
  PropSet out = tree.node(ai).pre;
  std::set<std::string> seen;
  for (const std::string& id : trace) {
    if (!seen.insert(id).second) continue;
    int n = tree.index_of(id);
    if (n == ai || !tree.seq_bef(n, ai)) continue;
    for (const std::string& achieved : tree.node(n).post) out.erase(achieved);
  }
  return out;
}

namespace detail {

// Shared body of the full and contrastive computations. foil < 0 selects the
// full explanation. For the contrastive one, `choice_scope` is the set of
// ancestors of x that are not ancestors of the foil, plus their closest
// common ancestor; desires and ancestor conditions use the same set minus
// that common ancestor.
inline FactorSet explain(const GoalPlanTree& tree, const Trace& trace, const Marking& marking,
                         int x, int foil) {
  FactorSet fs;
  const bool contrastive = foil >= 0;
  const int common = contrastive ? tree.ca(x, foil) : -1;

  std::vector<int> plain_scope;   // desires + ancestor conditions
  std::vector<int> choice_scope;  // excluded choices + valuings
  for (int n : tree.ancestors(x)) {
    if (contrastive && tree.ancest(n, foil)) continue;
    plain_scope.push_back(n);
    choice_scope.push_back(n);
  }
  if (contrastive) choice_scope.push_back(common);

  // Desires: non-OR ancestors; OR nodes carry less information than the
  // chosen child, so they are dropped.
  for (int n : plain_scope)
    if (!is_or_kind(tree.node(n).kind)) add_desire(fs, tree.node(n).id);

  // Beliefs, case 1: preconditions of x and, for the full explanation, of
  // every earlier traced action; achieved preconditions are filtered out.
  // A contrastive question implies the earlier actions were expected, so
  // only x's own preconditions remain.
  int j = first_occurrence(trace, tree.node(x).id);
  if (contrastive) {
    add_condition_beliefs(fs, filter_pre(tree, trace, tree.node(x).id));
  } else {
    for (int i = 0; i <= j; ++i) add_condition_beliefs(fs, filter_pre(tree, trace, trace[i]));
  }

  // Beliefs, case 2: conditions of x and of the in-scope ancestors.
  if (tree.node(x).has_cond()) add_condition_beliefs(fs, *tree.node(x).cond);
  for (int n : plain_scope)
    if (tree.node(n).has_cond()) add_condition_beliefs(fs, *tree.node(n).cond);

  // Beliefs, case 3 + valuings: decisions at OR ancestors.
  for (int n : choice_scope) {
    const Node& anc = tree.node(n);
    if (anc.kind == NodeKind::One) {
      for (auto [nx, ni] : tree.sib(n, x)) {
        if (nheld(tree, ni, marking)) add_negated_condition(fs, *tree.node(ni).cond);
        if (held(tree, ni, marking))
          add_valuing(fs, tree.node(ni).id, tree.node(nx).id);
      }
    } else if (anc.kind == NodeKind::SOne) {
      // Older siblings were passed over, so their conditions were false.
      // Contrastively this only matters at the common ancestor, from the
      // foil's branch onward.
      int min_seqn = 1;
      if (contrastive) {
        if (n != common) continue;  // no branch towards the foil below n
        min_seqn = tree.node(tree.child_on_path(common, foil)).seqn;
      }
      for (auto [nx, ni] : tree.sib(n, x)) {
        if (!tree.node(ni).has_cond()) continue;
        if (tree.node(ni).seqn < tree.node(nx).seqn && tree.node(ni).seqn >= min_seqn)
          add_negated_condition(fs, *tree.node(ni).cond);
      }
    }
  }

  return fs;
}

}  // namespace detail

// Full explanation of "why did you do x?".
inline FactorSet explain_full(const GoalPlanTree& tree, const Trace& trace,
                              const Marking& marking, const std::string& x) {
  int xi = detail::require_traced_action(tree, trace, x);
  return detail::explain(tree, trace, marking, xi, -1);
}

// Contrastive explanation of "why did you do x instead of f?".
inline FactorSet explain_contrastive(const GoalPlanTree& tree, const Trace& trace,
                                     const Marking& marking, const std::string& x,
                                     const std::string& f) {
  int xi = detail::require_traced_action(tree, trace, x);
  int fi = tree.index_of(f);
  if (fi == xi) raise(Errc::InvalidFoil, "foil equals the fact: " + f);
  if (!tree.is_action(fi) || !tree.valid_foil_pair(xi, fi))
    raise(Errc::InvalidFoil, f + " is not a valid foil for " + x);
  return detail::explain(tree, trace, marking, xi, fi);
}

// Implicit-foil explanation: the union over all valid foils, i.e. the least
// restrictive contrastive filter.
inline FactorSet explain_implicit(const GoalPlanTree& tree, const Trace& trace,
                                  const Marking& marking, const std::string& x) {
  int xi = detail::require_traced_action(tree, trace, x);
  std::vector<int> foils = tree.valid_foils(xi);
  if (foils.empty()) raise(Errc::NoValidFoils, "no valid foils for " + x);
  FactorSet out;
  for (int f : foils) {
    FactorSet part = detail::explain(tree, trace, marking, xi, f);
    out.insert(part.begin(), part.end());
  }
  return out;
}

}  // namespace gptx
