#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gptx/explain.hpp"
#include "gptx/treegen.hpp"

namespace gptx {

// One (fact, foil) measurement: F is the size of the full explanation,
// C the size of the contrastive one.
struct EvalRecord {
  int tree_index = 0;
  std::string fact;
  std::string foil;
  int full_size = 0;
  int contrastive_size = 0;
};

struct BinStats {
  int f_bin = 0;  // records whose full size equals this value
  double median_f = 0.0;
  double median_c = 0.0;
  double median_saving = 0.0;  // F - C
  int count = 0;
};

struct Quantiles {
  double min = 0.0, p25 = 0.0, median = 0.0, p75 = 0.0, max = 0.0;
};

struct EvalSummary {
  std::vector<BinStats> bins;  // ascending by f_bin
  Quantiles full;
  Quantiles contrastive;
  Quantiles saving;
  Quantiles ratio;  // C / F over records with F > 0
  int record_count = 0;
};

// Everything the evaluation loop knows about one fact: the tree and trace
// it was measured against, its full explanation, and the contrastive
// explanation per valid foil (empty when the fact has no foils).
struct EvalCase {
  int tree_index;
  const GoalPlanTree& tree;
  const Trace& trace;
  const Marking& marking;
  const std::string& fact;
  const FactorSet& full_explanation;
  const std::vector<std::pair<std::string, FactorSet>>& contrastive;
};

// The evaluation loop: n_trees corpus trees (regenerated until >= theta
// nodes, per-tree derived streams), one trace per action node, one
// contrastive explanation per valid foil. The visitor receives one EvalCase
// per action node.
template <typename Visitor>
void for_each_eval_case(const GenParams& params, int n_trees, Visitor&& visit) {
  params.validate();
  for (int t = 0; t < n_trees; ++t) {
    Rng rng(Rng::derive(params.seed, static_cast<uint64_t>(t)));
    GoalPlanTree tree = gen_tree_min_size(params, rng);
    for (int a : tree.action_indices()) {
      const std::string& fact = tree.node(a).id;
      TraceResult tr = generate_trace(tree, fact, rng);
      FactorSet full = explain_full(tree, tr.trace, tr.marking, fact);
      std::vector<std::pair<std::string, FactorSet>> contrastive;
      for (int f : tree.valid_foils(a)) {
        const std::string& foil = tree.node(f).id;
        contrastive.emplace_back(foil,
                                 explain_contrastive(tree, tr.trace, tr.marking, fact, foil));
      }
      visit(EvalCase{t, tree, tr.trace, tr.marking, fact, full, contrastive});
    }
  }
}

// Flat record list, sorted by (tree_index, fact, foil).
inline std::vector<EvalRecord> run_eval(const GenParams& params, int n_trees) {
  std::vector<EvalRecord> records;
  for_each_eval_case(params, n_trees, [&](const EvalCase& c) {
    for (const auto& [foil, fs] : c.contrastive)
      records.push_back({c.tree_index, c.fact, foil, static_cast<int>(c.full_explanation.size()),
                         static_cast<int>(fs.size())});
  });
  std::sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    return std::tie(a.tree_index, a.fact, a.foil) < std::tie(b.tree_index, b.fact, b.foil);
  });
  return records;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Linear interpolation between order statistics (the common "type 7" rule).
inline double quantile_of(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  double idx = p * static_cast<double>(v.size() - 1);
  size_t lo = static_cast<size_t>(idx);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = idx - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

inline Quantiles quantiles_of(const std::vector<double>& v) {
  Quantiles q;
  q.min = quantile_of(v, 0.0);
  q.p25 = quantile_of(v, 0.25);
  q.median = quantile_of(v, 0.5);
  q.p75 = quantile_of(v, 0.75);
  q.max = quantile_of(v, 1.0);
  return q;
}

}  // namespace detail

// Per-F-bin medians plus overall quantiles. Order-insensitive in the input.
inline EvalSummary summarize(const std::vector<EvalRecord>& records) {
  if (records.empty()) raise(Errc::InvalidParams, "summarize: no records");

  std::map<int, std::vector<const EvalRecord*>> by_f;
  std::vector<double> f, c, saving, ratio;
  for (const EvalRecord& r : records) {
    by_f[r.full_size].push_back(&r);
    f.push_back(r.full_size);
    c.push_back(r.contrastive_size);
    saving.push_back(r.full_size - r.contrastive_size);
    if (r.full_size > 0)
      ratio.push_back(static_cast<double>(r.contrastive_size) / r.full_size);
  }

  EvalSummary s;
  s.record_count = static_cast<int>(records.size());
  for (const auto& [bin, rs] : by_f) {
    std::vector<double> bf, bc, bs;
    for (const EvalRecord* r : rs) {
      bf.push_back(r->full_size);
      bc.push_back(r->contrastive_size);
      bs.push_back(r->full_size - r->contrastive_size);
    }
    s.bins.push_back({bin, detail::median_of(bf), detail::median_of(bc), detail::median_of(bs),
                      static_cast<int>(rs.size())});
  }
  s.full = detail::quantiles_of(f);
  s.contrastive = detail::quantiles_of(c);
  s.saving = detail::quantiles_of(saving);
  if (!ratio.empty()) s.ratio = detail::quantiles_of(ratio);
  return s;
}

namespace detail {

// Locale-independent, shortest-form number formatting so CSV bytes are
// reproducible.
inline std::string format_number(double v) {
  if (v == static_cast<int64_t>(v)) return std::to_string(static_cast<int64_t>(v));
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << v;
  return os.str();
}

}  // namespace detail

inline void write_records_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
  out << "tree_index,fact,foil,full_size,contrastive_size\n";
  for (const EvalRecord& r : records)
    out << r.tree_index << ',' << r.fact << ',' << r.foil << ',' << r.full_size << ','
        << r.contrastive_size << '\n';
}

inline void write_summary_csv(std::ostream& out, const EvalSummary& summary) {
  out << "f_bin,median_f,median_c,median_saving,count\n";
  for (const BinStats& b : summary.bins)
    out << b.f_bin << ',' << detail::format_number(b.median_f) << ','
        << detail::format_number(b.median_c) << ',' << detail::format_number(b.median_saving)
        << ',' << b.count << '\n';
}

inline nlohmann::json run_manifest(const GenParams& params, int n_trees, int record_count,
                                   const std::string& tool_version) {
  return nlohmann::json{
      {"alpha", params.alpha},   {"delta", params.delta},
      {"epsilon", params.epsilon}, {"theta", params.theta},
      {"seed", params.seed},     {"random_posts", params.random_posts},
      {"trees", n_trees},        {"records", record_count},
      {"tool", "gptx"},          {"version", tool_version},
  };
}

// Writes <prefix>records.csv, <prefix>summary.csv and <prefix>manifest.json.
inline void write_csv(const std::vector<EvalRecord>& records, const EvalSummary& summary,
                      const GenParams& params, int n_trees, const std::string& prefix,
                      const std::string& tool_version) {
  {
    std::ostringstream os;
    write_records_csv(os, records);
    write_file(prefix + "records.csv", os.str());
  }
  {
    std::ostringstream os;
    write_summary_csv(os, summary);
    write_file(prefix + "summary.csv", os.str());
  }
  write_file(prefix + "manifest.json",
             run_manifest(params, n_trees, static_cast<int>(records.size()), tool_version).dump(2) +
                 "\n");
}

// Plain-text bin table for terminal output.
inline std::string format_bin_table(const EvalSummary& summary) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "   F  median_C  median_F-C  count\n";
  for (const BinStats& b : summary.bins) {
    os.width(4);
    os << b.f_bin;
    os.width(10);
    os << detail::format_number(b.median_c);
    os.width(12);
    os << detail::format_number(b.median_saving);
    os.width(7);
    os << b.count << '\n';
  }
  return os.str();
}

}  // namespace gptx
