#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gptx/error.hpp"
#include "gptx/rng.hpp"
#include "gptx/tree.hpp"
#include "gptx/tree_io.hpp"

namespace gptx {

// Parameters of the random goal-plan tree generator.
struct GenParams {
  double alpha = 0.5;   // probability that a non-root, non-max-depth node is an action
  int delta = 5;        // maximum depth; nodes at this depth only get action children
  int epsilon = 5;      // maximum number of children of a goal node
  int theta = 20;       // minimum tree size, enforced per corpus tree by regeneration
  uint64_t seed = 0;
  // Actions get empty post-conditions, which makes precondition filtering a
  // no-op on generated trees. Enable to reuse precondition atoms as posts of
  // other actions and exercise the filter.
  bool random_posts = false;

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0) raise(Errc::InvalidParams, "alpha must be in [0, 1]");
    if (delta < 2) raise(Errc::InvalidParams, "delta must be at least 2");
    if (epsilon < 2) raise(Errc::InvalidParams, "epsilon must be at least 2");
    if (theta < 0) raise(Errc::InvalidParams, "theta must be non-negative");
  }
};

namespace detail {

enum class Category { Or, And };

struct GenState {
  TreeBuilder builder;
  int counter = 0;
};

// One node of the traditional alternating AND/OR structure. Every node gets
// a fresh condition atom C<i> (except the root, which has no incoming edge)
// and every action a fresh precondition atom P<i>.
inline int gen_node(GenState& st, const GenParams& params, Rng& rng, int parent,
                    Category category, int depth) {
  int i = ++st.counter;
  std::string id = "N" + std::to_string(i);
  std::optional<PropSet> cond;
  if (parent >= 0) cond = PropSet{"C" + std::to_string(i)};

  const bool action =
      depth >= params.delta || (depth > 1 && rng.uniform01() < params.alpha);
  if (action)
    return st.builder.add_action(parent, id, id, PropSet{"P" + std::to_string(i)}, PropSet{},
                                 std::move(cond));

  NodeKind kind;
  if (category == Category::Or) {
    constexpr NodeKind ors[] = {NodeKind::One, NodeKind::SOne, NodeKind::XOne};
    kind = ors[rng.below(3)];
  } else {
    constexpr NodeKind ands[] = {NodeKind::All, NodeKind::Seq};
    kind = ands[rng.below(2)];
  }
  int idx = st.builder.add_goal(parent, id, id, kind, std::move(cond));

  int n_children = rng.uniform_int(2, params.epsilon);
  Category child_category = category == Category::Or ? Category::And : Category::Or;
  for (int c = 0; c < n_children; ++c) gen_node(st, params, rng, idx, child_category, depth + 1);
  return idx;
}

}  // namespace detail

// Generates one random goal-plan tree. The root is always an OR goal; OR
// children alternate to AND goals and vice versa, unless they come out as
// actions (probability alpha past depth 1, certainty at depth delta).
inline GoalPlanTree gen_tree(const GenParams& params, Rng& rng) {
  params.validate();
  detail::GenState st;
  detail::gen_node(st, params, rng, -1, detail::Category::Or, 1);
  GoalPlanTree tree = st.builder.build();

  if (!params.random_posts) return tree;

  // Rebuild with posts drawn from the precondition atoms of other actions,
  // so that seq-related pairs can trigger the precondition filter.
  std::vector<int> actions = tree.action_indices();
  std::vector<std::string> atoms;
  for (int a : actions) atoms.insert(atoms.end(), tree.node(a).pre.begin(), tree.node(a).pre.end());
  TreeBuilder rebuilt;
  std::vector<int> remap(static_cast<size_t>(tree.size()), -1);
  for (int i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(i);
    int parent = n.parent < 0 ? -1 : remap[static_cast<size_t>(n.parent)];
    if (n.kind == NodeKind::Action) {
      PropSet post;
      if (rng.bernoulli(0.5)) post.insert(atoms[rng.below(atoms.size())]);
      remap[static_cast<size_t>(i)] = rebuilt.add_action(parent, n.id, n.name, n.pre,
                                                         std::move(post), n.cond);
    } else {
      remap[static_cast<size_t>(i)] = rebuilt.add_goal(parent, n.id, n.name, n.kind, n.cond);
    }
  }
  return rebuilt.build();
}

// Regenerates until the tree reaches theta nodes. Bounded so that parameter
// combinations whose maximum size is below theta fail instead of spinning.
inline GoalPlanTree gen_tree_min_size(const GenParams& params, Rng& rng) {
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    GoalPlanTree tree = gen_tree(params, rng);
    if (tree.size() >= params.theta) return tree;
  }
  raise(Errc::InvalidParams,
        "theta appears unreachable for these generation parameters");
}

// Exactly `count` trees, each regenerated until it has at least theta nodes.
// Tree t draws from its own stream derived from (seed, t), so corpora are
// reproducible and trees are independent of the count requested.
inline std::vector<GoalPlanTree> gen_corpus(const GenParams& params, int count) {
  params.validate();
  if (count < 1) raise(Errc::InvalidParams, "corpus count must be at least 1");
  std::vector<GoalPlanTree> out;
  out.reserve(static_cast<size_t>(count));
  for (int t = 0; t < count; ++t) {
    Rng rng(Rng::derive(params.seed, static_cast<uint64_t>(t)));
    out.push_back(gen_tree_min_size(params, rng));
  }
  return out;
}

// FNV-1a over the serialized form; stable across platforms and runs.
inline uint64_t fnv1a64(std::string_view data, uint64_t h = 0xCBF29CE484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline uint64_t tree_fingerprint(const GoalPlanTree& tree) {
  return fnv1a64(serialize_tree(tree));
}

inline uint64_t corpus_fingerprint(const std::vector<GoalPlanTree>& corpus) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (const GoalPlanTree& tree : corpus) h = fnv1a64(serialize_tree(tree), h);
  return h;
}

}  // namespace gptx
