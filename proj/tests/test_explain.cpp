#include "doctest.h"

#include <string>
#include <vector>

#include "gptx/explain.hpp"
#include "gptx/factor.hpp"
#include "gptx/trace.hpp"
#include "gptx/tree.hpp"
#include "gptx/treegen.hpp"

#include "naive_oracle.hpp"
#include "test_util.hpp"

using namespace gptx;

namespace {

// Trace and markings of the worked coffee scenario: own card fetched, then
// kitchen coffee; a colleague's card was available, money was at hand, Ann
// was not in her office.
struct CoffeeScenario {
  GoalPlanTree tree = testutil::load_coffee_tree();
  Trace trace{"getOwnCard", "goto(kitchen)", "getCoffee(kitchen)"};
  Marking marking{
      {"getcoffee", MarkValue::True},       {"getKitchenCoffee", MarkValue::True},
      {"getStaffCard", MarkValue::True},    {"getOwnCard", MarkValue::True},
      {"goto(kitchen)", MarkValue::True},   {"getCoffee(kitchen)", MarkValue::True},
      {"getOthersCard", MarkValue::True},   {"getOfficeCoffee", MarkValue::False},
      {"getShopCoffee", MarkValue::True},
  };
};

FactorSet coffee_full_expected() {
  FactorSet fs;
  add_desire(fs, "getKitchenCoffee");
  add_condition_beliefs(fs, {"ownCard"});
  add_condition_beliefs(fs, {"staffCardAvailable"});
  add_negated_condition(fs, {"AnnInOffice"});
  add_valuing(fs, "getOthersCard", "getOwnCard");
  add_valuing(fs, "getShopCoffee", "getKitchenCoffee");
  return fs;
}

FactorSet coffee_contrastive_expected() {
  FactorSet fs;
  add_condition_beliefs(fs, {"ownCard"});
  add_valuing(fs, "getOthersCard", "getOwnCard");
  return fs;
}

}  // namespace

TEST_CASE("coffee: full explanation is the six-factor set") {
  CoffeeScenario s;
  FactorSet fs = explain_full(s.tree, s.trace, s.marking, "getOwnCard");
  CHECK(fs == coffee_full_expected());
  CHECK(fs.size() == 6);
  CHECK(oracle::Oracle(s.tree).explain_full(s.trace, s.marking, s.tree.index_of("getOwnCard")) == fs);
}

TEST_CASE("coffee: contrastive explanation against getOthersCard is the two-factor set") {
  CoffeeScenario s;
  FactorSet fs = explain_contrastive(s.tree, s.trace, s.marking, "getOwnCard", "getOthersCard");
  CHECK(fs == coffee_contrastive_expected());
  CHECK(fs.size() == 2);
  CHECK(oracle::Oracle(s.tree).explain_contrastive(
            s.trace, s.marking, s.tree.index_of("getOwnCard"),
            s.tree.index_of("getOthersCard")) == fs);
}

TEST_CASE("coffee: implicit explanation unions the three contrastive sets") {
  CoffeeScenario s;
  oracle::Oracle naive(s.tree);
  FactorSet expected;
  for (const char* foil : {"getOthersCard", "goto(office)", "goto(shop)"}) {
    FactorSet part = naive.explain_contrastive(s.trace, s.marking,
                                               s.tree.index_of("getOwnCard"),
                                               s.tree.index_of(foil));
    expected.insert(part.begin(), part.end());
  }
  CHECK(explain_implicit(s.tree, s.trace, s.marking, "getOwnCard") == expected);
}

TEST_CASE("filter_pre") {
  GoalPlanTree tree = testutil::load_coffee_tree();
  Trace shop{"goto(shop)", "pay(shop)", "getCoffee(shop)"};

  SUBCASE("achieved preconditions are excluded") {
    PropSet filtered = filter_pre(tree, shop, "getCoffee(shop)");
    CHECK(filtered.count("atShop") == 0);  // post of goto(shop), which is seq-before
    CHECK(filtered.count("paid") == 0);    // post of pay(shop)
    CHECK(filtered.empty());
    CHECK(filter_pre(tree, shop, "pay(shop)") == PropSet{"money"});
  }

  SUBCASE("empty preconditions stay empty") {
    CHECK(filter_pre(tree, shop, "goto(shop)").empty());
  }

  SUBCASE("all-siblings do not filter even with matching posts") {
    TreeBuilder b;
    int g = b.add_goal(-1, "G", "G", NodeKind::All);
    b.add_action(g, "A1", "A1", {}, {"q"});
    b.add_action(g, "A2", "A2", {"q"}, {});
    GoalPlanTree all = b.build();
    CHECK(filter_pre(all, Trace{"A1", "A2"}, "A2") == PropSet{"q"});
  }

  SUBCASE("errors when the action is not traced") {
    CHECK_THROWS_AS(filter_pre(tree, shop, "getOwnCard"), Error);
  }
}

TEST_CASE("seq pair: full explanation filters the achieved precondition") {
  TreeBuilder b;
  int g = b.add_goal(-1, "G", "G", NodeKind::Seq);
  b.add_action(g, "A1", "A1", {"p"}, {"q"});
  b.add_action(g, "A2", "A2", {"q", "r"}, {});
  GoalPlanTree tree = b.build();
  Trace trace{"A1", "A2"};
  Marking marking{{"G", MarkValue::True}, {"A1", MarkValue::True}, {"A2", MarkValue::True}};

  FactorSet expected;
  add_desire(expected, "G");
  add_condition_beliefs(expected, {"p"});
  add_condition_beliefs(expected, {"r"});

  CHECK(explain_full(tree, trace, marking, "A2") == expected);
  CHECK(oracle::Oracle(tree).explain_full(trace, marking, tree.index_of("A2")) == expected);
}

TEST_CASE("xone pair: contrastive keeps the fact's precondition and condition") {
  TreeBuilder b;
  int g = b.add_goal(-1, "G", "G", NodeKind::XOne);
  b.add_action(g, "A", "A", {"pA"}, {}, PropSet{"cA"});
  b.add_action(g, "B", "B", {}, {}, PropSet{"cB"});
  GoalPlanTree tree = b.build();
  Trace trace{"A"};
  Marking marking{{"G", MarkValue::True}, {"A", MarkValue::True}, {"B", MarkValue::False}};

  FactorSet expected;
  add_condition_beliefs(expected, {"pA"});
  add_condition_beliefs(expected, {"cA"});

  FactorSet fs = explain_contrastive(tree, trace, marking, "A", "B");
  CHECK(fs == expected);  // no desires (root is the common ancestor), no xone choice factors
  CHECK(oracle::Oracle(tree).explain_contrastive(trace, marking, 1, 2) == fs);

  // Implicit over the single foil equals the contrastive answer.
  CHECK(explain_implicit(tree, trace, marking, "A") == fs);
}

TEST_CASE("sone contrastive keeps only siblings from the foil's branch onward") {
  TreeBuilder b;
  int g = b.add_goal(-1, "G", "G", NodeKind::SOne);
  b.add_action(g, "A1", "A1", {}, {}, PropSet{"c1"});
  b.add_action(g, "A2", "A2", {}, {}, PropSet{"c2"});
  b.add_action(g, "A3", "A3", {}, {}, PropSet{"c3"});
  b.add_action(g, "A4", "A4", {}, {}, PropSet{"c4"});
  GoalPlanTree tree = b.build();
  Trace trace{"A4"};
  Marking marking{{"G", MarkValue::True},
                  {"A1", MarkValue::False},
                  {"A2", MarkValue::False},
                  {"A3", MarkValue::False},
                  {"A4", MarkValue::True}};

  // Full: all older siblings' failed conditions.
  FactorSet full = explain_full(tree, trace, marking, "A4");
  FactorSet full_expected;
  add_condition_beliefs(full_expected, {"c4"});
  add_negated_condition(full_expected, {"c1"});
  add_negated_condition(full_expected, {"c2"});
  add_negated_condition(full_expected, {"c3"});
  CHECK(full == full_expected);

  // Against foil A2 only c2 and c3 remain: c1 precedes the foil's branch.
  FactorSet con = explain_contrastive(tree, trace, marking, "A4", "A2");
  FactorSet con_expected;
  add_condition_beliefs(con_expected, {"c4"});
  add_negated_condition(con_expected, {"c2"});
  add_negated_condition(con_expected, {"c3"});
  CHECK(con == con_expected);
  CHECK(oracle::Oracle(tree).explain_contrastive(trace, marking, tree.index_of("A4"),
                                                 tree.index_of("A2")) == con);
}

TEST_CASE("explanation error vocabulary") {
  CoffeeScenario s;
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;  // not reached
  };

  CHECK(code_of([&] { explain_full(s.tree, s.trace, s.marking, "pay(shop)"); }) ==
        Errc::NotInTrace);
  CHECK(code_of([&] { explain_full(s.tree, s.trace, s.marking, "getcoffee"); }) ==
        Errc::NotAction);
  CHECK(code_of([&] {
          explain_contrastive(s.tree, s.trace, s.marking, "getOwnCard", "getOwnCard");
        }) == Errc::InvalidFoil);
  CHECK(code_of([&] {
          explain_contrastive(s.tree, s.trace, s.marking, "getOwnCard", "getCoffee(shop)");
        }) == Errc::InvalidFoil);
  CHECK(code_of([&] { explain_implicit(s.tree, s.trace, s.marking, "getCoffee(kitchen)"); }) ==
        Errc::NoValidFoils);
  CHECK(code_of([&] { explain_full(s.tree, s.trace, s.marking, "nosuch"); }) ==
        Errc::UnknownNode);
}

TEST_CASE("marking granularity: held, nheld, unknown partition the one-siblings") {
  CoffeeScenario s;

  // Unknown marking on a sibling contributes neither a belief nor a valuing.
  Marking silent = s.marking;
  silent.erase("getOfficeCoffee");
  silent.erase("getShopCoffee");
  FactorSet fs = explain_full(s.tree, s.trace, silent, "getOwnCard");
  FactorSet expected;
  add_desire(expected, "getKitchenCoffee");
  add_condition_beliefs(expected, {"ownCard"});
  add_condition_beliefs(expected, {"staffCardAvailable"});
  add_valuing(expected, "getOthersCard", "getOwnCard");
  CHECK(fs == expected);
}

TEST_CASE("engine equals the naive oracle on a generated corpus") {
  GenParams params;
  params.delta = 4;
  params.epsilon = 4;
  params.theta = 10;
  params.seed = 31415;
  auto corpus = gen_corpus(params, 15);
  for (size_t t = 0; t < corpus.size(); ++t) {
    const GoalPlanTree& tree = corpus[t];
    if (tree.size() > 40) continue;
    Rng rng(Rng::derive(271828, t));
    oracle::Oracle naive(tree);
    for (int x : tree.action_indices()) {
      const std::string& fact = tree.node(x).id;
      TraceResult tr = generate_trace(tree, fact, rng);
      FactorSet full = explain_full(tree, tr.trace, tr.marking, fact);
      CHECK(full == naive.explain_full(tr.trace, tr.marking, x));
      for (int f : tree.valid_foils(x)) {
        FactorSet con =
            explain_contrastive(tree, tr.trace, tr.marking, fact, tree.node(f).id);
        CHECK(con == naive.explain_contrastive(tr.trace, tr.marking, x, f));
      }
    }
  }
}

TEST_CASE("subset and implicit-union properties on a generated corpus") {
  GenParams params;
  params.seed = 2024;
  params.theta = 15;
  auto corpus = gen_corpus(params, 10);
  for (size_t t = 0; t < corpus.size(); ++t) {
    const GoalPlanTree& tree = corpus[t];
    Rng rng(Rng::derive(161803, t));
    for (int x : tree.action_indices()) {
      const std::string& fact = tree.node(x).id;
      TraceResult tr = generate_trace(tree, fact, rng);
      FactorSet full = explain_full(tree, tr.trace, tr.marking, fact);
      auto foils = tree.valid_foils(x);
      FactorSet unioned;
      for (int f : foils) {
        FactorSet con =
            explain_contrastive(tree, tr.trace, tr.marking, fact, tree.node(f).id);
        CHECK(std::includes(full.begin(), full.end(), con.begin(), con.end()));
        unioned.insert(con.begin(), con.end());
      }
      if (!foils.empty()) {
        CHECK(explain_implicit(tree, tr.trace, tr.marking, fact) == unioned);
        CHECK(std::includes(full.begin(), full.end(), unioned.begin(), unioned.end()));
      }
    }
  }
}

TEST_CASE("each one-sibling contributes a negated belief or a valuing, never both") {
  GenParams params;
  params.seed = 512;
  params.theta = 15;
  auto corpus = gen_corpus(params, 10);
  for (size_t t = 0; t < corpus.size(); ++t) {
    const GoalPlanTree& tree = corpus[t];
    Rng rng(Rng::derive(640, t));
    for (int x : tree.action_indices()) {
      TraceResult tr = generate_trace(tree, tree.node(x).id, rng);
      FactorSet full = explain_full(tree, tr.trace, tr.marking, tree.node(x).id);
      for (int n : tree.ancestors(x)) {
        if (tree.node(n).kind != NodeKind::One) continue;
        for (auto [nx, ni] : tree.sib(n, x)) {
          if (!tree.node(ni).has_cond()) continue;
          // Generated atoms are tree-unique, so membership pins the source.
          bool negated = full.count(Belief{Polarity::Negated, *tree.node(ni).cond}) > 0;
          bool valued = full.count(Valuing{tree.node(ni).id, tree.node(nx).id}) > 0;
          CHECK(negated != valued);
          CHECK(negated == nheld(tree, ni, tr.marking));
          CHECK(valued == held(tree, ni, tr.marking));
        }
      }
    }
  }
}

TEST_CASE("determinism: identical inputs give identical sets and renderings") {
  CoffeeScenario s;
  FactorSet a = explain_full(s.tree, s.trace, s.marking, "getOwnCard");
  FactorSet b = explain_full(s.tree, s.trace, s.marking, "getOwnCard");
  CHECK(a == b);
  CHECK(render_text(a) == render_text(b));
}

TEST_CASE("render_text") {
  SUBCASE("valuing template") {
    FactorSet fs;
    add_valuing(fs, "getOthersCard", "getOwnCard");
    CHECK(render_text(fs) == "I prefer getOwnCard over getOthersCard");
  }
  SUBCASE("empty set") { CHECK(render_text(FactorSet{}) == "(no factors)"); }
  SUBCASE("coffee contrastive renders belief before valuing") {
    CoffeeScenario s;
    FactorSet fs =
        explain_contrastive(s.tree, s.trace, s.marking, "getOwnCard", "getOthersCard");
    CHECK(render_text(fs) == "because ownCard\nI prefer getOwnCard over getOthersCard");
  }
  SUBCASE("full coffee rendering is group-ordered") {
    CoffeeScenario s;
    FactorSet fs = explain_full(s.tree, s.trace, s.marking, "getOwnCard");
    CHECK(render_text(fs) ==
          "I want to getKitchenCoffee\n"
          "because not AnnInOffice\n"
          "because ownCard\n"
          "because staffCardAvailable\n"
          "I prefer getOwnCard over getOthersCard\n"
          "I prefer getKitchenCoffee over getShopCoffee");
  }
  SUBCASE("negated conjunction renders with parentheses") {
    FactorSet fs;
    add_negated_condition(fs, {"a", "b"});
    CHECK(render_text(fs) == "because not (a and b)");
  }
}

TEST_CASE("factor set json shape") {
  CoffeeScenario s;
  FactorSet fs = explain_contrastive(s.tree, s.trace, s.marking, "getOwnCard", "getOthersCard");
  nlohmann::json j = factor_set_to_json(fs);
  CHECK(j.at("size") == 2);
  REQUIRE(j.at("factors").size() == 2);
  CHECK(j.at("factors")[0].at("kind") == "belief");
  CHECK(j.at("factors")[0].at("polarity") == "positive");
  CHECK(j.at("factors")[0].at("content") == nlohmann::json::array({"ownCard"}));
  CHECK(j.at("factors")[1].at("kind") == "valuing");
  CHECK(j.at("factors")[1].at("less") == "getOthersCard");
  CHECK(j.at("factors")[1].at("more") == "getOwnCard");
}
