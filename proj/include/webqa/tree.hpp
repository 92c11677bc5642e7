#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace webqa {

using feature_value = std::variant<double, std::string>;
using feature_vector = std::map<std::string, feature_value>;

enum class feature_kind { numeric, categorical };

struct feature_spec {
  std::string name;
  feature_kind kind = feature_kind::numeric;
  friend bool operator==(const feature_spec &, const feature_spec &) = default;
};

/// Ordered by feature name.
using feature_schema = std::vector<feature_spec>;

feature_schema schema_of(const feature_vector &fv);

struct training_case {
  feature_vector features;
  bool label = false;
};

struct tree_config {
  double min_gain = 1e-3; // bits
  std::size_t min_leaf = 5;
  std::size_t max_depth = 64;
};

struct tree_node {
  bool leaf = true;
  // split (internal nodes); numeric: value <= threshold goes left,
  // categorical: value == category goes left
  std::string feature;
  feature_kind kind = feature_kind::numeric;
  double threshold = 0.0;
  std::string category;
  std::size_t left = 0;
  std::size_t right = 0;
  // every node keeps its training statistics; leaves predict from them
  std::size_t support = 0;
  std::size_t positives = 0;
  double probability = 0.5;
};

/// Binary decision tree mapping feature vectors to a success probability.
/// Node 0 is the root. Immutable once built; safe to share across threads.
class decision_tree {
public:
  decision_tree() = default;
  decision_tree(feature_schema schema, std::vector<tree_node> nodes);

  /// Throws missing_feature when a tested feature is absent and
  /// schema_mismatch when its value has the wrong kind.
  double predict(const feature_vector &fv) const;
  std::size_t leaf_index(const feature_vector &fv) const;

  const feature_schema &schema() const { return schema_; }
  const std::vector<tree_node> &nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static decision_tree from_json(const nlohmann::json &j);
  void save(const std::string &path) const;
  static decision_tree load(const std::string &path);

  /// Indented text rendering of the splits and leaves.
  void print(std::ostream &os) const;

private:
  feature_schema schema_;
  std::vector<tree_node> nodes_;
};

/// Greedy top-down induction: each node takes the split with the highest
/// information gain on the binary label (ties go to the earlier feature
/// name, then the smaller threshold/category). A node stays a leaf when it
/// has fewer than min_leaf cases, sits at max_depth, its best gain is below
/// min_gain, or the split would lower the smoothed training log-likelihood.
/// Numeric thresholds are midpoints between sorted distinct values;
/// categorical splits are one-vs-rest. Leaves predict (pos + 1) / (n + 2).
///
/// Throws no_training_data on an empty set and schema_mismatch when cases
/// disagree on feature names or kinds.
decision_tree train_tree(const std::vector<training_case> &cases,
                         const tree_config &cfg = {});

inline double predict(const decision_tree &tree, const feature_vector &fv) {
  return tree.predict(fv);
}

/// Swappable model-induction strategy.
class tree_learner {
public:
  virtual ~tree_learner() = default;
  virtual decision_tree fit(const std::vector<training_case> &cases) const = 0;
};

class info_gain_learner final : public tree_learner {
public:
  explicit info_gain_learner(tree_config cfg = {}) : cfg_(cfg) {}
  decision_tree fit(const std::vector<training_case> &cases) const override {
    return train_tree(cases, cfg_);
  }

private:
  tree_config cfg_;
};

/// Sum of log p(label) over the cases under the tree's predictions.
double log_likelihood(const decision_tree &tree,
                      const std::vector<training_case> &cases);

nlohmann::json to_json(const feature_vector &fv);
feature_vector feature_vector_from_json(const nlohmann::json &j);

} // namespace webqa
