#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "webqa/compose.hpp"
#include "webqa/models.hpp"
#include "webqa/rewrite.hpp"
#include "webqa/search.hpp"

namespace webqa {

/// Answer value expressed as a multiple of the per-query cost: v = k * c.
struct preferences {
  double k = 10.0;
  double c = 1.0;

  /// Throws config_error unless k > 0 and c > 0.
  void validate() const;
};

/// p * k * c - n * c; a missing answer is worth nothing.
double net_expected_value(double p, int n, const preferences &prefs);

struct budget_decision {
  bool abstain = false;
  int n = 0; // rewrites to submit when !abstain
  double expected_net = 0.0;
  std::map<int, double> per_threshold_net;
  std::map<int, double> probability;
};

/// Net value for every budget; submits the argmax (smallest n on ties) or
/// abstains when every budget has negative net value.
budget_decision choose_n(const std::map<int, double> &probability_by_threshold,
                         const preferences &prefs);

budget_decision choose_n(const budget_model &model, const feature_vector &fv,
                         const preferences &prefs,
                         const std::vector<int> &thresholds = default_thresholds());

enum class policy_kind {
  random_n,
  likelihood_n,
  conjunctive_only,
  all_rewrites,
  cost_benefit
};

std::string_view to_string(policy_kind k);
std::optional<policy_kind> parse_policy_kind(std::string_view name);

struct policy_spec {
  policy_kind kind = policy_kind::all_rewrites;
  std::size_t n = 0;       // random_n, likelihood_n
  std::uint64_t seed = 0;  // random_n
  preferences prefs;       // cost_benefit

  static policy_spec random(std::size_t n, std::uint64_t seed) {
    return {policy_kind::random_n, n, seed, {}};
  }
  static policy_spec likelihood(std::size_t n) {
    return {policy_kind::likelihood_n, n, 0, {}};
  }
  static policy_spec conjunctive() { return {policy_kind::conjunctive_only, 0, 0, {}}; }
  static policy_spec all() { return {policy_kind::all_rewrites, 0, 0, {}}; }
  static policy_spec cost_benefit(preferences p) {
    return {policy_kind::cost_benefit, 0, 0, p};
  }

  /// Stable label for reports, e.g. "likelihood-3", "cost-benefit-k10-c1".
  std::string id() const;
};

struct model_set {
  const decision_tree *conj = nullptr;
  const decision_tree *phrasal = nullptr;
  const budget_model *budget = nullptr;
};

struct pipeline_config {
  rewrite_config rewrites;
  std::size_t limit = default_limit;
  const stoplist *stop = &stoplist::builtin();
  const filter_table *filters = &filter_table::builtin();
  const grammar_scorer *scorer = nullptr; // heuristic scorer when null
  std::vector<int> thresholds = default_thresholds();
  /// Quality-ordered rewrites run before the budget decision.
  std::size_t probe_size = 2;
};

struct question_result {
  question q;
  std::vector<rewrite> rewrites;
  std::vector<double> quality; // empty unless the policy scored rewrites
  std::vector<std::size_t> submitted;
  composition comp;
  std::size_t queries_issued = 0;
  std::optional<budget_decision> decision;
  std::optional<run_features> probe_features;
  bool abstained = false;
  std::vector<std::string> errors;

  std::optional<std::string> top_answer() const;
};

/// Runs one question under a policy: picks rewrites, executes them against
/// the provider, and composes answers. Backend failures on individual
/// rewrites are recorded in `errors`; the question still completes.
/// Scoring policies need models.conj/phrasal; cost_benefit also needs
/// models.budget.
question_result run_policy(const policy_spec &policy, std::string_view question_text,
                           const search_provider &backend, const model_set &models,
                           const pipeline_config &cfg = {});

/// Shared pipeline pieces, reused by training-data collection.
weight_map weights_of(const std::vector<rewrite> &rewrites);
std::vector<double> weight_classes(const rewrite_config &cfg);
std::vector<double> quality_scores(const std::vector<rewrite> &rewrites,
                                   const model_set &models,
                                   const pipeline_config &cfg);
compose_options compose_options_for(const question &q, const pipeline_config &cfg);
const grammar_scorer &scorer_of(const pipeline_config &cfg);

} // namespace webqa
