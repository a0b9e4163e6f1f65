#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gptx/error.hpp"

namespace gptx {

// A goal-plan tree abstracts a BDI plan library: action leaves carry
// pre/post-conditions, goal nodes carry a decomposition type. AND kinds
// (all, seq) execute every child; OR kinds (one, sone, xone) select one.
enum class NodeKind { Action, All, Seq, One, SOne, XOne };

inline bool is_or_kind(NodeKind k) noexcept {
  return k == NodeKind::One || k == NodeKind::SOne || k == NodeKind::XOne;
}

inline bool is_and_kind(NodeKind k) noexcept {
  return k == NodeKind::All || k == NodeKind::Seq;
}

inline std::string_view to_string(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::Action: return "action";
    case NodeKind::All: return "all";
    case NodeKind::Seq: return "seq";
    case NodeKind::One: return "one";
    case NodeKind::SOne: return "sone";
    case NodeKind::XOne: return "xone";
  }
  return "?";
}

inline std::optional<NodeKind> kind_from_string(std::string_view s) noexcept {
  if (s == "action") return NodeKind::Action;
  if (s == "all") return NodeKind::All;
  if (s == "seq") return NodeKind::Seq;
  if (s == "one") return NodeKind::One;
  if (s == "sone") return NodeKind::SOne;
  if (s == "xone") return NodeKind::XOne;
  return std::nullopt;
}

// A condition (and an action pre/post-condition) is a conjunction of
// proposition atoms, represented as a sorted set.
using PropSet = std::set<std::string>;

struct Node {
  std::string id;    // unique within the tree; queries use ids
  std::string name;  // display name, may repeat across the tree
  NodeKind kind = NodeKind::Action;
  PropSet pre;   // actions only
  PropSet post;  // actions only
  // Condition on the edge from the parent; absent for the root and for
  // condition-less edges. An empty condition is normalized to absent.
  std::optional<PropSet> cond;
  int seqn = 0;  // 1..n under a Seq/SOne parent, 0 otherwise
  int parent = -1;
  int depth = 0;  // root is 0
  std::vector<int> children;  // indices, in declaration (= seqn) order

  bool has_cond() const noexcept { return cond.has_value() && !cond->empty(); }
};

// Immutable after construction; all queries are const and thread-safe.
class GoalPlanTree {
 public:
  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  int root() const noexcept { return 0; }
  const Node& node(int idx) const { return nodes_[static_cast<size_t>(idx)]; }
  bool is_action(int idx) const { return node(idx).kind == NodeKind::Action; }

  // -1 when the id is absent.
  int find(const std::string& id) const noexcept {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  }

  int index_of(const std::string& id) const {
    int idx = find(id);
    if (idx < 0) raise(Errc::UnknownNode, "unknown node id: " + id);
    return idx;
  }

  // Preorder list of action node indices.
  std::vector<int> action_indices() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
      if (is_action(i)) out.push_back(i);
    return out;
  }

  // True when a is a strict ancestor of b.
  bool ancest(int a, int b) const {
    for (int p = node(b).parent; p >= 0; p = node(p).parent)
      if (p == a) return true;
    return false;
  }

  // Child of `ancestor` on the path towards `descendant` (which may be that
  // child itself).
  int child_on_path(int ancestor, int descendant) const {
    int cur = descendant;
    while (cur >= 0 && node(cur).parent != ancestor) cur = node(cur).parent;
    if (cur < 0)
      raise(Errc::InvalidQuery, node(ancestor).id + " is not an ancestor of " +
                                    node(descendant).id);
    return cur;
  }

  // Closest common ancestor of two distinct nodes, neither of which is an
  // ancestor of the other. Uses strict ancestry on both sides, so the pair
  // (ancestor, descendant) has no valid result and is rejected.
  int ca(int x, int f) const {
    if (x == f) raise(Errc::InvalidQuery, "ca: identical nodes: " + node(x).id);
    if (ancest(x, f) || ancest(f, x))
      raise(Errc::InvalidQuery,
            "ca: " + node(x).id + " and " + node(f).id + " are ancestor-related");
    std::vector<int> px = root_path(x);
    std::vector<int> pf = root_path(f);
    size_t n = std::min(px.size(), pf.size());
    size_t i = 0;
    while (i < n && px[i] == pf[i]) ++i;
    return px[i - 1];
  }

  // All pairs (n_x, n_i) where n_x is the child of n on the path to x (or x
  // itself) and n_i ranges over the remaining children of n.
  std::vector<std::pair<int, int>> sib(int n, int x) const {
    int nx = child_on_path(n, x);  // rejects non-ancestors
    std::vector<std::pair<int, int>> out;
    for (int ni : node(n).children)
      if (ni != nx) out.emplace_back(nx, ni);
    return out;
  }

  // True when a necessarily occurs before b in any trace: some decomposition
  // places ancestors-or-selves of a and b under a common Seq parent with
  // smaller/larger sequence numbers. Equivalently, the paths of a and b
  // diverge at a Seq node and a's branch has the smaller seqn.
  bool seq_bef(int a, int b) const {
    if (a == b) return false;
    if (ancest(a, b) || ancest(b, a)) return false;
    std::vector<int> pa = root_path(a);
    std::vector<int> pb = root_path(b);
    size_t n = std::min(pa.size(), pb.size());
    size_t i = 0;
    while (i < n && pa[i] == pb[i]) ++i;
    int lca = pa[i - 1];
    if (node(lca).kind != NodeKind::Seq) return false;
    return node(pa[i]).seqn < node(pb[i]).seqn;
  }

  // Possible first actions of the subtree rooted at n: an action is itself;
  // a Seq goal starts with its first child; any other goal may start with
  // any child.
  std::vector<int> first(int n) const {
    std::vector<int> out;
    first_into(n, out);
    return out;
  }

  bool first_contains(int n, int action) const {
    if (node(n).kind == NodeKind::Action) return n == action;
    if (node(n).kind == NodeKind::Seq) return first_contains(node(n).children.front(), action);
    for (int c : node(n).children)
      if (first_contains(c, action)) return true;
    return false;
  }

  // True when f is a valid foil for fact x: their closest common ancestor is
  // an OR node and each is a possible first action of its branch.
  bool valid_foil_pair(int x, int f) const {
    if (x == f) return false;
    if (!is_action(x) || !is_action(f)) return false;
    int c = ca(x, f);  // distinct actions are never ancestor-related
    if (!is_or_kind(node(c).kind)) return false;
    int nx = child_on_path(c, x);
    int nf = child_on_path(c, f);
    return first_contains(nx, x) && first_contains(nf, f);
  }

  // All valid foils of action x, in preorder.
  std::vector<int> valid_foils(int x) const {
    if (!is_action(x))
      raise(Errc::NotAction, "valid_foils: not an action node: " + node(x).id);
    std::vector<int> out;
    for (int f = 0; f < size(); ++f)
      if (is_action(f) && f != x && valid_foil_pair(x, f)) out.push_back(f);
    return out;
  }

  // Indices from the root down to n, inclusive.
  std::vector<int> root_path(int n) const {
    std::vector<int> path;
    for (int cur = n; cur >= 0; cur = node(cur).parent) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Strict ancestors of n, nearest first.
  std::vector<int> ancestors(int n) const {
    std::vector<int> out;
    for (int p = node(n).parent; p >= 0; p = node(p).parent) out.push_back(p);
    return out;
  }

  // --- id-based variants of the query surface ---

  bool ancest(const std::string& a, const std::string& b) const {
    return ancest(index_of(a), index_of(b));
  }

  std::string ca(const std::string& x, const std::string& f) const {
    return node(ca(index_of(x), index_of(f))).id;
  }

  std::vector<std::pair<std::string, std::string>> sib(const std::string& n,
                                                       const std::string& x) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [nx, ni] : sib(index_of(n), index_of(x)))
      out.emplace_back(node(nx).id, node(ni).id);
    return out;
  }

  bool seq_bef(const std::string& a, const std::string& b) const {
    return seq_bef(index_of(a), index_of(b));
  }

  std::vector<std::string> first(const std::string& n) const {
    return ids(first(index_of(n)));
  }

  std::vector<std::string> valid_foils(const std::string& x) const {
    return ids(valid_foils(index_of(x)));
  }

  std::vector<std::string> ids(const std::vector<int>& idxs) const {
    std::vector<std::string> out;
    out.reserve(idxs.size());
    for (int i : idxs) out.push_back(node(i).id);
    return out;
  }

 private:
  friend class TreeBuilder;

  void first_into(int n, std::vector<int>& out) const {
    const Node& nd = node(n);
    if (nd.kind == NodeKind::Action) {
      out.push_back(n);
    } else if (nd.kind == NodeKind::Seq) {
      first_into(nd.children.front(), out);
    } else {
      for (int c : nd.children) first_into(c, out);
    }
  }

  std::vector<Node> nodes_;  // preorder; 0 is the root
  std::unordered_map<std::string, int> index_;
};

// Incremental construction; build() checks the structural invariants that
// cannot be enforced earlier (non-empty goals).
class TreeBuilder {
 public:
  // parent = -1 adds the root.
  int add_action(int parent, std::string id, std::string name, PropSet pre, PropSet post,
                 std::optional<PropSet> cond = std::nullopt) {
    int idx = add(std::move(id), std::move(name), NodeKind::Action, parent, std::move(cond));
    nodes_[static_cast<size_t>(idx)].pre = std::move(pre);
    nodes_[static_cast<size_t>(idx)].post = std::move(post);
    return idx;
  }

  int add_goal(int parent, std::string id, std::string name, NodeKind kind,
               std::optional<PropSet> cond = std::nullopt) {
    if (kind == NodeKind::Action)
      raise(Errc::MalformedDocument, "add_goal called with action kind");
    return add(std::move(id), std::move(name), kind, parent, std::move(cond));
  }

  GoalPlanTree build() {
    if (nodes_.empty()) raise(Errc::MalformedDocument, "empty tree");
    for (const Node& n : nodes_) {
      if (n.kind != NodeKind::Action && n.children.empty())
        raise(Errc::MalformedDocument, "goal node without children: " + n.id);
      for (const std::string& atom : n.pre) require_atom(atom, n.id);
      for (const std::string& atom : n.post) require_atom(atom, n.id);
      if (n.cond)
        for (const std::string& atom : *n.cond) require_atom(atom, n.id);
    }
    GoalPlanTree tree;
    tree.nodes_ = std::move(nodes_);
    tree.index_ = std::move(index_);
    nodes_.clear();
    index_.clear();
    return tree;
  }

 private:
  int add(std::string id, std::string name, NodeKind kind, int parent,
          std::optional<PropSet> cond) {
    if (parent < 0 && !nodes_.empty())
      raise(Errc::MalformedDocument, "second root node: " + id);
    if (parent >= static_cast<int>(nodes_.size()))
      raise(Errc::MalformedDocument, "unknown parent index for node " + id);
    if (index_.count(id)) raise(Errc::DuplicateId, "duplicate node id: " + id);
    if (cond && cond->empty()) cond.reset();

    Node n;
    n.id = id;
    n.name = name.empty() ? id : std::move(name);
    n.kind = kind;
    n.cond = std::move(cond);
    n.parent = parent;
    int idx = static_cast<int>(nodes_.size());
    if (parent >= 0) {
      Node& p = nodes_[static_cast<size_t>(parent)];
      if (p.kind == NodeKind::Action)
        raise(Errc::MalformedDocument, "action node with children: " + p.id);
      n.depth = p.depth + 1;
      p.children.push_back(idx);
      if (p.kind == NodeKind::Seq || p.kind == NodeKind::SOne)
        n.seqn = static_cast<int>(p.children.size());
    }
    index_.emplace(n.id, idx);
    nodes_.push_back(std::move(n));
    return idx;
  }

  static void require_atom(const std::string& atom, const std::string& id) {
    if (atom.empty())
      raise(Errc::MalformedDocument, "empty proposition atom on node " + id);
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> index_;
};

// Traditional BDI structure check (opt-in): OR children are actions or AND
// goals, AND children are actions or OR goals.
inline std::vector<std::string> strict_bdi_violations(const GoalPlanTree& tree) {
  std::vector<std::string> out;
  for (int i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(i);
    for (int c : n.children) {
      NodeKind ck = tree.node(c).kind;
      if (ck == NodeKind::Action) continue;
      if (is_or_kind(n.kind) && !is_and_kind(ck))
        out.push_back("child " + tree.node(c).id + " of OR node " + n.id +
                      " is not an action or AND goal");
      if (is_and_kind(n.kind) && !is_or_kind(ck))
        out.push_back("child " + tree.node(c).id + " of AND node " + n.id +
                      " is not an action or OR goal");
    }
  }
  return out;
}

// Companion check, separate because Appendix-style generated trees put a
// condition atom on every edge: conditions belong only on children of OR
// nodes.
inline std::vector<std::string> condition_placement_violations(const GoalPlanTree& tree) {
  std::vector<std::string> out;
  for (int i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(i);
    if (!n.has_cond() || n.parent < 0) continue;
    if (!is_or_kind(tree.node(n.parent).kind))
      out.push_back("condition on node " + n.id + " whose parent " +
                    tree.node(n.parent).id + " is not an OR node");
  }
  return out;
}

}  // namespace gptx
