#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "gptx/error.hpp"
#include "gptx/tree.hpp"

namespace gptx {

struct ParseOptions {
  bool strict_bdi = false;         // reject non-alternating AND/OR structure
  bool strict_conditions = false;  // reject conditions off OR-node children
};

namespace detail {

inline PropSet props_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array())
    raise(Errc::MalformedDocument, where + ": expected an array of atoms");
  PropSet out;
  for (const auto& atom : j) {
    if (!atom.is_string() || atom.get<std::string>().empty())
      raise(Errc::MalformedDocument, where + ": atoms must be non-empty strings");
    out.insert(atom.get<std::string>());
  }
  return out;
}

inline void parse_node(TreeBuilder& builder, const nlohmann::json& j, int parent,
                       std::optional<PropSet> cond) {
  if (!j.is_object()) raise(Errc::MalformedDocument, "node must be an object");
  if (!j.contains("id") || !j.at("id").is_string() || j.at("id").get<std::string>().empty())
    raise(Errc::MalformedDocument, "node without a string id");
  const std::string id = j.at("id").get<std::string>();
  std::string name = j.value("name", id);

  if (!j.contains("kind") || !j.at("kind").is_string())
    raise(Errc::MalformedDocument, "node " + id + ": missing kind");
  auto kind = kind_from_string(j.at("kind").get<std::string>());
  if (!kind)
    raise(Errc::MalformedDocument,
          "node " + id + ": unknown kind '" + j.at("kind").get<std::string>() + "'");

  if (*kind == NodeKind::Action) {
    if (j.contains("children") && !j.at("children").empty())
      raise(Errc::MalformedDocument, "action node " + id + " has children");
    PropSet pre = j.contains("pre") ? props_from_json(j.at("pre"), id + ".pre") : PropSet{};
    PropSet post = j.contains("post") ? props_from_json(j.at("post"), id + ".post") : PropSet{};
    builder.add_action(parent, id, std::move(name), std::move(pre), std::move(post),
                       std::move(cond));
    return;
  }

  if ((j.contains("pre") && !j.at("pre").empty()) || (j.contains("post") && !j.at("post").empty()))
    raise(Errc::MalformedDocument, "goal node " + id + " carries pre/post conditions");
  if (!j.contains("children") || !j.at("children").is_array() || j.at("children").empty())
    raise(Errc::MalformedDocument, "goal node " + id + " needs a non-empty children array");

  int idx = builder.add_goal(parent, id, std::move(name), *kind, std::move(cond));

  const bool sequenced = *kind == NodeKind::Seq || *kind == NodeKind::SOne;
  int expected_seqn = 1;
  for (const auto& edge : j.at("children")) {
    if (!edge.is_object() || !edge.contains("node"))
      raise(Errc::MalformedDocument, "child entries of " + id + " need a 'node' field");
    std::optional<PropSet> child_cond;
    if (edge.contains("cond")) {
      PropSet c = props_from_json(edge.at("cond"), id + ".children.cond");
      if (!c.empty()) child_cond = std::move(c);
    }
    if (edge.contains("seqn")) {
      if (!sequenced)
        raise(Errc::MalformedDocument,
              "seqn on a child of " + id + ", whose kind is not seq/sone");
      if (!edge.at("seqn").is_number_integer() || edge.at("seqn").get<int>() != expected_seqn)
        raise(Errc::MalformedDocument,
              "children of " + id + " must carry seqn 1..n in order (seqn gap)");
    } else if (sequenced) {
      raise(Errc::MalformedDocument,
            "child of " + std::string(to_string(*kind)) + " node " + id + " is missing its seqn");
    }
    ++expected_seqn;
    parse_node(builder, edge.at("node"), idx, std::move(child_cond));
  }
}

}  // namespace detail

// Parses the tree document format. The document root is the root node
// object; see the bundled coffee fixture for the normative example.
inline GoalPlanTree parse_tree(const std::string& text, const ParseOptions& opts = {}) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) raise(Errc::MalformedDocument, "tree document is not valid JSON");

  TreeBuilder builder;
  detail::parse_node(builder, doc, -1, std::nullopt);
  GoalPlanTree tree = builder.build();

  if (opts.strict_bdi) {
    auto violations = strict_bdi_violations(tree);
    if (!violations.empty())
      raise(Errc::MalformedDocument, "strict BDI structure: " + violations.front());
  }
  if (opts.strict_conditions) {
    auto violations = condition_placement_violations(tree);
    if (!violations.empty())
      raise(Errc::MalformedDocument, "strict conditions: " + violations.front());
  }
  return tree;
}

namespace detail {

inline nlohmann::json node_to_json(const GoalPlanTree& tree, int idx) {
  const Node& n = tree.node(idx);
  nlohmann::json j;
  j["id"] = n.id;
  j["name"] = n.name;
  j["kind"] = std::string(to_string(n.kind));
  if (n.kind == NodeKind::Action) {
    j["pre"] = n.pre;
    j["post"] = n.post;
    return j;
  }
  nlohmann::json children = nlohmann::json::array();
  for (int c : n.children) {
    const Node& cn = tree.node(c);
    nlohmann::json edge;
    if (cn.has_cond()) edge["cond"] = *cn.cond;
    if (cn.seqn > 0) edge["seqn"] = cn.seqn;
    edge["node"] = node_to_json(tree, c);
    children.push_back(std::move(edge));
  }
  j["children"] = std::move(children);
  return j;
}

}  // namespace detail

inline nlohmann::json tree_to_json(const GoalPlanTree& tree) {
  return detail::node_to_json(tree, tree.root());
}

inline std::string serialize_tree(const GoalPlanTree& tree) {
  return tree_to_json(tree).dump(2) + "\n";
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) raise(Errc::IoError, "failed writing " + path.string());
}

inline GoalPlanTree load_tree(const std::filesystem::path& path, const ParseOptions& opts = {}) {
  return parse_tree(read_file(path), opts);
}

inline void save_tree(const GoalPlanTree& tree, const std::filesystem::path& path) {
  write_file(path, serialize_tree(tree));
}

}  // namespace gptx
