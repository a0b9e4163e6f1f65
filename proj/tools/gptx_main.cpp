// Command-line front end: explanation queries, foil listing, tree/trace
// generation, the size-reduction evaluation, and trace validation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gptx/gptx.hpp"

namespace {

// Stable exit codes, documented in --help and the README.
enum ExitCode : int {
  kOk = 0,
  // 1 is the generic failure code, 2 is CLI11's usage error.
  kInputError = 3,   // unreadable/malformed files, bad parameters
  kBadQuery = 4,     // unknown node, non-action node, invalid structural query
  kNotInTrace = 5,   // the queried fact was not done
  kInvalidFoil = 6,  // the foil is not a valid alternative to the fact
  kNoValidFoils = 7, // implicit question has no foil to contrast with
  kInvalid = 8,      // validation diagnostics were reported
};

int exit_code_for(const gptx::Error& e) {
  switch (e.code()) {
    case gptx::Errc::NotInTrace: return kNotInTrace;
    case gptx::Errc::InvalidFoil: return kInvalidFoil;
    case gptx::Errc::NoValidFoils: return kNoValidFoils;
    case gptx::Errc::UnknownNode:
    case gptx::Errc::NotAction:
    case gptx::Errc::InvalidQuery: return kBadQuery;
    default: return kInputError;
  }
}

constexpr const char* kFormatNotes = R"(File formats:
  tree   JSON object per node: id, name, kind (action|all|seq|one|sone|xone),
         pre/post (atom arrays, actions only), children (array of
         {cond?: atom array, seqn?: 1..n for seq/sone, node: <node>}).
         The document root is the tree root; see data/coffee.tree.json.
  trace  JSON object {tree: <reference>, actions: [node ids in order],
         markings: {node id: "true"|"false"|"unknown"}}. Missing markings
         default to unknown.
  factors (--json) {factors: [{kind: desire|belief|valuing, ...}], size: N}
  eval   <prefix>records.csv  tree_index,fact,foil,full_size,contrastive_size
         <prefix>summary.csv  f_bin,median_f,median_c,median_saving,count
         <prefix>manifest.json  run parameters, seed, record count

Exit codes:
  0 ok, 1 internal error, 2 usage, 3 input error, 4 bad query,
  5 fact not in trace, 6 invalid foil, 7 no valid foils,
  8 validation diagnostics reported)";

struct ExplainArgs {
  std::string tree_path;
  std::string trace_path;
  std::string fact;
  std::string foil;
  bool implicit = false;
  bool as_json = false;
};

void warn_on_odd_query(const gptx::GoalPlanTree& tree, const gptx::TraceFile& tf,
                       const ExplainArgs& args) {
  int occurrences = 0;
  for (const auto& id : tf.actions)
    if (id == args.fact) ++occurrences;
  if (occurrences > 1)
    std::cerr << "warning: " << args.fact
              << " occurs " << occurrences
              << " times in the trace; explaining its first occurrence\n";
  if (!args.foil.empty())
    for (const auto& id : tf.actions)
      if (id == args.foil) {
        std::cerr << "warning: foil " << args.foil << " appears in the trace\n";
        break;
      }
  if (!tf.tree_ref.empty() && tf.tree_ref != args.tree_path &&
      tf.tree_ref != tree.node(tree.root()).id)
    std::cerr << "warning: trace references tree '" << tf.tree_ref
              << "', which matches neither the file path nor the root id\n";
}

int cmd_explain(const ExplainArgs& args) {
  gptx::GoalPlanTree tree = gptx::load_tree(args.tree_path);
  gptx::TraceFile tf = gptx::load_trace(args.trace_path);
  warn_on_odd_query(tree, tf, args);

  gptx::FactorSet fs;
  try {
    if (args.implicit)
      fs = gptx::explain_implicit(tree, tf.actions, tf.marking, args.fact);
    else if (!args.foil.empty())
      fs = gptx::explain_contrastive(tree, tf.actions, tf.marking, args.fact, args.foil);
    else
      fs = gptx::explain_full(tree, tf.actions, tf.marking, args.fact);
  } catch (const gptx::Error& e) {
    if (e.code() == gptx::Errc::NotInTrace) {
      std::cout << "I didn't do " << args.fact << "\n";
      return kNotInTrace;
    }
    throw;
  }

  if (args.as_json)
    std::cout << gptx::factor_set_to_json(fs).dump(2) << "\n";
  else
    std::cout << gptx::render_text(fs, tree) << "\n";
  return kOk;
}

int cmd_foils(const std::string& tree_path, const std::string& fact) {
  gptx::GoalPlanTree tree = gptx::load_tree(tree_path);
  for (const auto& id : tree.valid_foils(fact)) std::cout << id << "\n";
  return kOk;
}

int cmd_gen(const gptx::GenParams& params, int count, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto corpus = gptx::gen_corpus(params, count);

  nlohmann::json manifest;
  manifest["alpha"] = params.alpha;
  manifest["delta"] = params.delta;
  manifest["epsilon"] = params.epsilon;
  manifest["theta"] = params.theta;
  manifest["seed"] = params.seed;
  manifest["random_posts"] = params.random_posts;
  manifest["count"] = count;
  nlohmann::json trees = nlohmann::json::array();

  for (size_t t = 0; t < corpus.size(); ++t) {
    std::ostringstream name;
    name << "tree_" << t << ".json";
    fs::path path = fs::path(out_dir) / name.str();
    gptx::save_tree(corpus[t], path);

    std::ostringstream fp;
    fp << std::hex << gptx::tree_fingerprint(corpus[t]);
    trees.push_back({{"file", name.str()},
                     {"nodes", corpus[t].size()},
                     {"fingerprint", fp.str()}});
  }
  manifest["trees"] = std::move(trees);
  gptx::write_file(fs::path(out_dir) / "corpus.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << corpus.size() << " trees to " << out_dir << "\n";
  return kOk;
}

int cmd_trace(const std::string& tree_path, const std::string& fact, uint64_t seed,
              double p_true, const std::string& out_path) {
  gptx::GoalPlanTree tree = gptx::load_tree(tree_path);
  gptx::Rng rng(seed);
  gptx::TraceResult tr = gptx::generate_trace(tree, fact, rng, p_true);

  gptx::TraceFile tf;
  tf.tree_ref = tree.node(tree.root()).id;
  tf.actions = std::move(tr.trace);
  tf.marking = std::move(tr.marking);
  if (out_path.empty())
    std::cout << gptx::serialize_trace(tf);
  else
    gptx::save_trace(tf, out_path);
  return kOk;
}

int cmd_eval(const gptx::GenParams& params, int n_trees, const std::string& prefix) {
  auto records = gptx::run_eval(params, n_trees);
  gptx::EvalSummary summary;
  if (!records.empty()) summary = gptx::summarize(records);
  gptx::write_csv(records, summary, params, n_trees, prefix, GPTX_VERSION);
  std::cout << "records: " << records.size() << "\n";
  if (!records.empty()) {
    std::cout << "medians: F=" << summary.full.median << " C=" << summary.contrastive.median
              << " F-C=" << summary.saving.median << " C/F=" << summary.ratio.median << "\n";
    std::cout << gptx::format_bin_table(summary);
  }
  return kOk;
}

int cmd_validate(const std::string& tree_path, const std::string& trace_path, bool strict_bdi,
                 bool strict_conditions) {
  gptx::GoalPlanTree tree = gptx::load_tree(tree_path);
  std::vector<std::string> problems;
  if (strict_bdi)
    for (auto& v : gptx::strict_bdi_violations(tree)) problems.push_back("strict-bdi: " + v);
  if (strict_conditions)
    for (auto& v : gptx::condition_placement_violations(tree))
      problems.push_back("conditions: " + v);

  if (!trace_path.empty()) {
    gptx::TraceFile tf = gptx::load_trace(trace_path);
    for (auto& d : gptx::validate_trace(tree, tf.actions, tf.marking))
      problems.push_back(d.code + ": " + d.message);
  }

  if (problems.empty()) {
    std::cout << "ok\n";
    return kOk;
  }
  for (const auto& p : problems) std::cout << p << "\n";
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-plan tree explanations: full, contrastive, and implicit-foil "
               "answers to \"why did you do X?\""};
  app.footer(kFormatNotes);
  app.require_subcommand(1);

  // explain
  ExplainArgs explain_args;
  auto* explain = app.add_subcommand("explain", "Explain an action from a tree and a trace");
  explain->add_option("--tree", explain_args.tree_path, "Tree file")->required();
  explain->add_option("--trace", explain_args.trace_path, "Trace file")->required();
  explain->add_option("--fact", explain_args.fact, "Action to explain (node id)")->required();
  auto* foil_opt =
      explain->add_option("--foil", explain_args.foil, "Foil action for a contrastive answer");
  explain->add_flag("--implicit", explain_args.implicit,
                    "Contrast against every valid foil (implicit-foil question)")
      ->excludes(foil_opt);
  explain->add_flag("--json", explain_args.as_json, "Structured output instead of text");

  // foils
  std::string foils_tree, foils_fact;
  auto* foils = app.add_subcommand("foils", "List the valid foils of an action");
  foils->add_option("--tree", foils_tree, "Tree file")->required();
  foils->add_option("--fact", foils_fact, "Action (node id)")->required();

  // gen
  gptx::GenParams gen_params;
  int gen_count = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate random goal-plan trees");
  gen->add_option("--alpha", gen_params.alpha, "Action-node probability")->capture_default_str();
  gen->add_option("--delta", gen_params.delta, "Maximum depth")->capture_default_str();
  gen->add_option("--epsilon", gen_params.epsilon, "Maximum children per goal")
      ->capture_default_str();
  gen->add_option("--theta", gen_params.theta, "Minimum tree size")->capture_default_str();
  gen->add_option("--count", gen_count, "Number of trees")->capture_default_str();
  gen->add_option("--seed", gen_params.seed, "RNG seed")->required();
  gen->add_flag("--random-posts", gen_params.random_posts,
                "Give actions post-conditions drawn from other preconditions");
  gen->add_option("--out", gen_out, "Output directory")->required();

  // trace
  std::string trace_tree, trace_fact, trace_out;
  uint64_t trace_seed = 0;
  double trace_p_true = 0.5;
  auto* trace = app.add_subcommand("trace", "Generate a trace reaching an action");
  trace->add_option("--tree", trace_tree, "Tree file")->required();
  trace->add_option("--fact", trace_fact, "Action the trace must contain")->required();
  trace->add_option("--seed", trace_seed, "RNG seed")->required();
  trace->add_option("--mark-true-prob", trace_p_true,
                    "Probability of marking an unconstrained one-sibling true")
      ->capture_default_str();
  trace->add_option("--out", trace_out, "Output file (stdout when omitted)");

  // eval
  gptx::GenParams eval_params;
  int eval_trees = 1000;
  std::string eval_prefix;
  auto* eval = app.add_subcommand("eval", "Measure full vs contrastive explanation sizes");
  eval->add_option("--alpha", eval_params.alpha, "Action-node probability")
      ->capture_default_str();
  eval->add_option("--delta", eval_params.delta, "Maximum depth")->capture_default_str();
  eval->add_option("--epsilon", eval_params.epsilon, "Maximum children per goal")
      ->capture_default_str();
  eval->add_option("--theta", eval_params.theta, "Minimum tree size")->capture_default_str();
  eval->add_option("--trees", eval_trees, "Number of corpus trees")->capture_default_str();
  eval->add_option("--seed", eval_params.seed, "RNG seed")->required();
  eval->add_flag("--random-posts", eval_params.random_posts,
                 "Give actions post-conditions drawn from other preconditions");
  eval->add_option("--out", eval_prefix, "Output path prefix")->required();

  // validate
  std::string val_tree, val_trace;
  bool val_strict_bdi = false, val_strict_conditions = false;
  auto* validate = app.add_subcommand("validate", "Check a tree and optionally a trace");
  validate->add_option("--tree", val_tree, "Tree file")->required();
  validate->add_option("--trace", val_trace, "Trace file");
  validate->add_flag("--strict-bdi", val_strict_bdi, "Require alternating AND/OR structure");
  validate->add_flag("--strict-conditions", val_strict_conditions,
                     "Require conditions only on children of OR nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // stable usage-error code; --help/--version stay 0
  }

  try {
    if (explain->parsed()) return cmd_explain(explain_args);
    if (foils->parsed()) return cmd_foils(foils_tree, foils_fact);
    if (gen->parsed()) return cmd_gen(gen_params, gen_count, gen_out);
    if (trace->parsed())
      return cmd_trace(trace_tree, trace_fact, trace_seed, trace_p_true, trace_out);
    if (eval->parsed()) return cmd_eval(eval_params, eval_trees, eval_prefix);
    if (validate->parsed())
      return cmd_validate(val_tree, val_trace, val_strict_bdi, val_strict_conditions);
  } catch (const gptx::Error& e) {
    std::cerr << "error (" << gptx::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
