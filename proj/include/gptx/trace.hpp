#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gptx/error.hpp"
#include "gptx/rng.hpp"
#include "gptx/tree.hpp"
#include "gptx/tree_io.hpp"

namespace gptx {

// Sequence of action node ids, in execution order.
using Trace = std::vector<std::string>;

// Whether a node's condition held when the node was reached. Unknown is the
// state of user-supplied traces that omit annotations: it satisfies neither
// held nor nheld, so it contributes no choice factor.
enum class MarkValue { True, False, Unknown };

using Marking = std::map<std::string, MarkValue>;

inline MarkValue mark_of(const Marking& marking, const std::string& id) {
  auto it = marking.find(id);
  return it == marking.end() ? MarkValue::Unknown : it->second;
}

// A condition-less node always counts as held.
inline bool held(const GoalPlanTree& tree, int idx, const Marking& marking) {
  const Node& n = tree.node(idx);
  if (!n.has_cond()) return true;
  return mark_of(marking, n.id) == MarkValue::True;
}

inline bool nheld(const GoalPlanTree& tree, int idx, const Marking& marking) {
  const Node& n = tree.node(idx);
  return n.has_cond() && mark_of(marking, n.id) == MarkValue::False;
}

struct TraceResult {
  Trace trace;
  Marking marking;
};

namespace detail {

// Uniform over all merges of the child traces: repeatedly draw the source
// with probability proportional to its remaining length.
inline Trace interleave(std::vector<Trace> parts, Rng& rng) {
  size_t total = 0;
  for (const Trace& p : parts) total += p.size();
  Trace out;
  out.reserve(total);
  std::vector<size_t> pos(parts.size(), 0);
  while (out.size() < total) {
    uint64_t pick = rng.below(total - out.size());
    for (size_t i = 0; i < parts.size(); ++i) {
      size_t remaining = parts[i].size() - pos[i];
      if (pick < remaining) {
        out.push_back(parts[i][pos[i]++]);
        break;
      }
      pick -= remaining;
    }
  }
  return out;
}

inline Trace generate_trace_rec(const GoalPlanTree& tree, int current, int target, Rng& rng,
                                double p_true, Marking& marking) {
  const Node& node = tree.node(current);
  marking[node.id] = MarkValue::True;  // reached, so its condition held

  if (node.kind == NodeKind::Action) return Trace{node.id};

  if (is_or_kind(node.kind)) {
    int chosen = -1;
    for (int c : node.children)
      if (c == target || tree.ancest(c, target)) chosen = c;
    // OR nodes outside the target's branch still execute; their choice is
    // unconstrained.
    if (chosen < 0)
      chosen = node.children[static_cast<size_t>(rng.below(node.children.size()))];

    for (int c : node.children) {
      if (c == chosen) continue;
      const Node& sibling = tree.node(c);
      switch (node.kind) {
        case NodeKind::One:
          // Condition-less siblings can only be marked True.
          marking[sibling.id] = !sibling.has_cond() || rng.bernoulli(p_true)
                                    ? MarkValue::True
                                    : MarkValue::False;
          break;
        case NodeKind::XOne:
          marking[sibling.id] = sibling.has_cond() ? MarkValue::False : MarkValue::True;
          break;
        case NodeKind::SOne:
          if (sibling.seqn < tree.node(chosen).seqn)
            marking[sibling.id] = sibling.has_cond() ? MarkValue::False : MarkValue::True;
          break;
        default:
          break;
      }
    }
    return generate_trace_rec(tree, chosen, target, rng, p_true, marking);
  }

  // AND node: every child runs; Seq concatenates, All interleaves.
  std::vector<Trace> parts;
  parts.reserve(node.children.size());
  for (int c : node.children)
    parts.push_back(generate_trace_rec(tree, c, target, rng, p_true, marking));
  if (node.kind == NodeKind::Seq) {
    Trace out;
    for (Trace& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  }
  return interleave(std::move(parts), rng);
}

}  // namespace detail

// Generates one trace consistent with the given action being executed, and
// marks node conditions accordingly: the chosen branch towards `target` is
// marked True; One siblings are marked at random (True with p_true), XOne
// siblings False, SOne older siblings False. Deterministic for a fixed seed.
inline TraceResult generate_trace(const GoalPlanTree& tree, const std::string& target, Rng& rng,
                                  double p_true = 0.5) {
  int t = tree.index_of(target);
  if (!tree.is_action(t))
    raise(Errc::NotAction, "generate_trace: not an action node: " + target);
  TraceResult result;
  result.trace =
      detail::generate_trace_rec(tree, tree.root(), t, rng, p_true, result.marking);
  return result;
}

struct Diagnostic {
  std::string code;  // stable category, e.g. "seq-order"
  std::string message;
};

// Consistency checks for a (trace, marking) pair against a tree. Empty
// result means: trace entries are known actions, Seq order is respected,
// each executed OR node contributes exactly one branch, XOne/SOne sibling
// markings match the selection semantics, and every node on the path to a
// traced action is marked True.
inline std::vector<Diagnostic> validate_trace(const GoalPlanTree& tree, const Trace& trace,
                                              const Marking& marking) {
  std::vector<Diagnostic> out;

  std::vector<int> traced;
  for (const std::string& id : trace) {
    int idx = tree.find(id);
    if (idx < 0) {
      out.push_back({"unknown-action", "trace entry is not in the tree: " + id});
      continue;
    }
    if (!tree.is_action(idx)) {
      out.push_back({"not-an-action", "trace entry is not an action node: " + id});
      continue;
    }
    traced.push_back(idx);
  }

  // (a) structural order: a later entry must never be seq-before an earlier one.
  for (size_t i = 0; i < traced.size(); ++i)
    for (size_t k = i + 1; k < traced.size(); ++k)
      if (tree.seq_bef(traced[k], traced[i]))
        out.push_back({"seq-order", tree.node(traced[k]).id + " must occur before " +
                                        tree.node(traced[i]).id});

  // Which nodes contribute traced actions.
  std::vector<bool> contributes(static_cast<size_t>(tree.size()), false);
  for (int a : traced)
    for (int n : tree.root_path(a)) contributes[static_cast<size_t>(n)] = true;

  for (int n = 0; n < tree.size(); ++n) {
    const Node& node = tree.node(n);
    if (!is_or_kind(node.kind) || !contributes[static_cast<size_t>(n)]) continue;

    // (b) exactly one branch of an executed OR node contributes.
    std::vector<int> active;
    for (int c : node.children)
      if (contributes[static_cast<size_t>(c)]) active.push_back(c);
    if (active.size() != 1) {
      out.push_back({"or-branches", "OR node " + node.id + " has " +
                                        std::to_string(active.size()) +
                                        " contributing children (expected 1)"});
      continue;
    }

    // (c) sibling markings implied by the selection semantics.
    int chosen = active.front();
    for (int c : node.children) {
      if (c == chosen || !tree.node(c).has_cond()) continue;
      const std::string& cid = tree.node(c).id;
      if (node.kind == NodeKind::XOne && mark_of(marking, cid) != MarkValue::False)
        out.push_back({"xone-marking", "xone sibling " + cid + " must be marked false"});
      if (node.kind == NodeKind::SOne && tree.node(c).seqn < tree.node(chosen).seqn &&
          mark_of(marking, cid) != MarkValue::False)
        out.push_back({"sone-marking", "sone older sibling " + cid + " must be marked false"});
    }
  }

  // (d) the executed spine is marked True.
  for (int n = 0; n < tree.size(); ++n)
    if (contributes[static_cast<size_t>(n)] && mark_of(marking, tree.node(n).id) != MarkValue::True)
      out.push_back({"path-marking",
                     "node " + tree.node(n).id + " lies on an executed path but is not marked true"});

  return out;
}

// --- trace file format ---

struct TraceFile {
  std::string tree_ref;  // id or path of the tree this trace belongs to
  Trace actions;
  Marking marking;
};

inline std::string_view to_string(MarkValue v) noexcept {
  switch (v) {
    case MarkValue::True: return "true";
    case MarkValue::False: return "false";
    case MarkValue::Unknown: return "unknown";
  }
  return "?";
}

inline TraceFile parse_trace(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    raise(Errc::MalformedDocument, "trace document is not a JSON object");
  TraceFile out;
  out.tree_ref = doc.value("tree", "");
  if (!doc.contains("actions") || !doc.at("actions").is_array())
    raise(Errc::MalformedDocument, "trace document needs an 'actions' array");
  for (const auto& a : doc.at("actions")) {
    if (!a.is_string() || a.get<std::string>().empty())
      raise(Errc::MalformedDocument, "trace actions must be non-empty strings");
    out.actions.push_back(a.get<std::string>());
  }
  if (doc.contains("markings")) {
    if (!doc.at("markings").is_object())
      raise(Errc::MalformedDocument, "'markings' must map node ids to true/false/unknown");
    for (const auto& [id, v] : doc.at("markings").items()) {
      if (!v.is_string())
        raise(Errc::MalformedDocument, "marking for " + id + " must be a string");
      const std::string s = v.get<std::string>();
      if (s == "true")
        out.marking[id] = MarkValue::True;
      else if (s == "false")
        out.marking[id] = MarkValue::False;
      else if (s == "unknown")
        out.marking[id] = MarkValue::Unknown;
      else
        raise(Errc::MalformedDocument, "marking for " + id + " must be true/false/unknown");
    }
  }
  return out;
}

inline std::string serialize_trace(const TraceFile& tf) {
  nlohmann::json doc;
  doc["tree"] = tf.tree_ref;
  doc["actions"] = tf.actions;
  nlohmann::json marks = nlohmann::json::object();
  for (const auto& [id, v] : tf.marking) marks[id] = std::string(to_string(v));
  doc["markings"] = std::move(marks);
  return doc.dump(2) + "\n";
}

inline TraceFile load_trace(const std::filesystem::path& path) {
  return parse_trace(read_file(path));
}

inline void save_trace(const TraceFile& tf, const std::filesystem::path& path) {
  write_file(path, serialize_trace(tf));
}

}  // namespace gptx
