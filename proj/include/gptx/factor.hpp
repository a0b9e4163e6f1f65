#pragma once

#include <compare>
#include <functional>
#include <set>
#include <string>
#include <variant>

#include "json.hpp"

#include "gptx/tree.hpp"

namespace gptx {

// An explanation is a set of explanatory factors: desires (goals pursued),
// beliefs (conditions that held, or failed to hold), and valuings (one
// option preferred over another). Time tags are omitted.

struct Desire {
  std::string node;
  auto operator<=>(const Desire&) const = default;
};

enum class Polarity { Positive, Negated };

struct Belief {
  Polarity polarity = Polarity::Positive;
  PropSet content;

  // Content-first ordering so rendered belief lines sort alphabetically.
  friend std::strong_ordering operator<=>(const Belief& a, const Belief& b) {
    if (auto c = a.content <=> b.content; c != 0) return c;
    return a.polarity <=> b.polarity;
  }
  friend bool operator==(const Belief& a, const Belief& b) = default;
};

struct Valuing {
  std::string less;
  std::string more;
  auto operator<=>(const Valuing&) const = default;
};

// Variant order fixes the group order used everywhere: desires, beliefs,
// valuings.
using Factor = std::variant<Desire, Belief, Valuing>;
using FactorSet = std::set<Factor>;

inline void add_desire(FactorSet& fs, std::string node) {
  fs.insert(Desire{std::move(node)});
}

// Positive belief in a conjunction: flattened to one factor per proposition,
// so identical propositions from different sources deduplicate.
inline void add_condition_beliefs(FactorSet& fs, const PropSet& cond) {
  for (const std::string& atom : cond)
    fs.insert(Belief{Polarity::Positive, PropSet{atom}});
}

// Negated condition: kept as one factor, since negation does not distribute
// over the conjunction. Empty conditions contribute nothing.
inline void add_negated_condition(FactorSet& fs, const PropSet& cond) {
  if (!cond.empty()) fs.insert(Belief{Polarity::Negated, cond});
}

inline void add_valuing(FactorSet& fs, std::string less, std::string more) {
  fs.insert(Valuing{std::move(less), std::move(more)});
}

// Display-name lookup for node ids; defaults to identity.
using NameResolver = std::function<std::string(const std::string&)>;

inline std::string join_atoms(const PropSet& atoms) {
  std::string out;
  for (const std::string& a : atoms) {
    if (!out.empty()) out += " and ";
    out += a;
  }
  return out;
}

inline std::string render_factor(const Factor& f, const NameResolver& name) {
  if (const auto* d = std::get_if<Desire>(&f)) return "I want to " + name(d->node);
  if (const auto* b = std::get_if<Belief>(&f)) {
    if (b->polarity == Polarity::Positive) return "because " + join_atoms(b->content);
    if (b->content.size() == 1) return "because not " + *b->content.begin();
    return "because not (" + join_atoms(b->content) + ")";
  }
  const auto& v = std::get<Valuing>(f);
  return "I prefer " + name(v.more) + " over " + name(v.less);
}

// Stable rendering: set order is (desires, beliefs, valuings), lexicographic
// within each group.
inline std::string render_text(const FactorSet& fs, const NameResolver& name) {
  if (fs.empty()) return "(no factors)";
  std::string out;
  for (const Factor& f : fs) {
    if (!out.empty()) out += '\n';
    out += render_factor(f, name);
  }
  return out;
}

inline std::string render_text(const FactorSet& fs) {
  return render_text(fs, [](const std::string& id) { return id; });
}

inline std::string render_text(const FactorSet& fs, const GoalPlanTree& tree) {
  return render_text(fs, [&tree](const std::string& id) {
    int idx = tree.find(id);
    return idx < 0 ? id : tree.node(idx).name;
  });
}

inline nlohmann::json factor_set_to_json(const FactorSet& fs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Factor& f : fs) {
    nlohmann::json item;
    if (const auto* d = std::get_if<Desire>(&f)) {
      item["kind"] = "desire";
      item["node"] = d->node;
    } else if (const auto* b = std::get_if<Belief>(&f)) {
      item["kind"] = "belief";
      item["polarity"] = b->polarity == Polarity::Positive ? "positive" : "negated";
      item["content"] = b->content;
    } else {
      const auto& v = std::get<Valuing>(f);
      item["kind"] = "valuing";
      item["less"] = v.less;
      item["more"] = v.more;
    }
    arr.push_back(std::move(item));
  }
  return nlohmann::json{{"factors", std::move(arr)}, {"size", fs.size()}};
}

}  // namespace gptx
