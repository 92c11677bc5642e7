#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "webqa/compose.hpp"
#include "webqa/rewrite.hpp"
#include "webqa/search.hpp"
#include "webqa/tree.hpp"

namespace webqa {

feature_vector to_features(const conj_features &f);
feature_vector to_features(const phrasal_features &f);

/// Query-quality score: conjunctive rewrites go through conj_tree,
/// phrasal ones through phrasal_tree.
double score_rewrite(const decision_tree &conj_tree,
                     const decision_tree &phrasal_tree, const rewrite &r,
                     const grammar_scorer &scorer,
                     const stoplist &stop = stoplist::builtin());

/// Indices of `rewrites` by descending score; ties keep generation order.
/// Throws length_mismatch when the sizes differ.
std::vector<std::size_t> order_rewrites(const std::vector<rewrite> &rewrites,
                                        const std::vector<double> &scores);

/// Per-run features used by the budget models.
struct run_features {
  double average_snippets_per_rewrite = 0.0;
  double diff_scores_1_2 = 0.0;
  std::string filter;  // question-type filter family, e.g. "who_filter"
  std::string filter2; // most frequently fired word/bigram filter, or "none"
  double maxrule = 0.0;
  std::size_t numngrams = 0;
  /// "rulescore_<w>" -> n-gram occurrences mined from rewrites of weight w
  std::map<std::string, std::size_t> rulescore;
  double std_deviation_answer_scores = 0.0;
  std::size_t totalqueries = 0;
  std::size_t totnonbagsnips = 0;
  std::size_t totsnips = 0;
};

std::string rulescore_name(double weight);

/// `used` indexes into `rewrites`; snippets carry rewrite_index into the
/// same list. `weight_classes` lists the rewrite weights in the active
/// configuration; each gets a rulescore entry even when zero.
run_features extract_run_features(const question &q,
                                  const std::vector<rewrite> &rewrites,
                                  const std::vector<std::size_t> &used,
                                  const std::vector<snippet> &snippets,
                                  const composition &comp,
                                  const std::vector<double> &weight_classes,
                                  const mining_options &mining);

feature_vector to_features(const run_features &f);

/// Rewrite budgets with a trained model: 1..10, 12, 15, 20.
const std::vector<int> &default_thresholds();

/// Anything that predicts end-to-end accuracy for a rewrite budget.
class budget_model {
public:
  virtual ~budget_model() = default;
  virtual std::vector<int> thresholds() const = 0;
  virtual double probability(int threshold, const feature_vector &fv) const = 0;
};

class threshold_ensemble final : public budget_model {
public:
  threshold_ensemble() = default;
  explicit threshold_ensemble(std::map<int, decision_tree> trees)
      : trees_(std::move(trees)) {}

  std::vector<int> thresholds() const override;
  double probability(int threshold, const feature_vector &fv) const override;

  const std::map<int, decision_tree> &trees() const { return trees_; }
  /// Throws incomplete_ensemble unless every listed threshold has a tree.
  void require(const std::vector<int> &thresholds) const;

  nlohmann::json to_json() const;
  static threshold_ensemble from_json(const nlohmann::json &j);
  void save(const std::string &path) const;
  static threshold_ensemble load(const std::string &path);

private:
  std::map<int, decision_tree> trees_;
};

/// One tree per threshold. Throws incomplete_ensemble when any threshold in
/// `thresholds` has no (or empty) data.
threshold_ensemble
train_threshold_ensemble(const std::map<int, std::vector<training_case>> &runs,
                         const std::vector<int> &thresholds = default_thresholds(),
                         const tree_config &cfg = {});

} // namespace webqa
