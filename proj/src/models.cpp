#include "webqa/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "webqa/error.hpp"

namespace webqa {

using json = nlohmann::json;

feature_vector to_features(const conj_features &f) {
  return {
      {"longphrase", static_cast<double>(f.longphrase)},
      {"longwd", static_cast<double>(f.longwd)},
      {"numcap", static_cast<double>(f.numcap)},
      {"numphrases", static_cast<double>(f.numphrases)},
      {"numstop", static_cast<double>(f.numstop)},
      {"numwords", static_cast<double>(f.numwords)},
      {"pctstop", f.pctstop},
  };
}

feature_vector to_features(const phrasal_features &f) {
  return {
      {"numcap", static_cast<double>(f.numcap)},
      {"numstop", static_cast<double>(f.numstop)},
      {"pctstop", f.pctstop},
      {"primary_parses", static_cast<double>(f.primary_parses)},
      {"secondary_parses", static_cast<double>(f.secondary_parses)},
      {"sgm", f.sgm},
  };
}

double score_rewrite(const decision_tree &conj_tree,
                     const decision_tree &phrasal_tree, const rewrite &r,
                     const grammar_scorer &scorer, const stoplist &stop) {
  if (r.kind == rewrite_kind::conjunctive)
    return conj_tree.predict(to_features(extract_conj_features(r, stop)));
  return phrasal_tree.predict(
      to_features(extract_phrasal_features(r, scorer, stop)));
}

std::vector<std::size_t> order_rewrites(const std::vector<rewrite> &rewrites,
                                        const std::vector<double> &scores) {
  if (rewrites.size() != scores.size())
    throw length_mismatch("got " + std::to_string(scores.size()) +
                          " scores for " + std::to_string(rewrites.size()) +
                          " rewrites");
  std::vector<std::size_t> order(rewrites.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

std::string rulescore_name(double weight) {
  std::ostringstream os;
  os << "rulescore_" << weight;
  return os.str();
}

run_features extract_run_features(const question &q,
                                  const std::vector<rewrite> &rewrites,
                                  const std::vector<std::size_t> &used,
                                  const std::vector<snippet> &snippets,
                                  const composition &comp,
                                  const std::vector<double> &weight_classes,
                                  const mining_options &mining) {
  run_features f;
  f.totalqueries = used.size();
  f.totsnips = snippets.size();
  f.average_snippets_per_rewrite =
      used.empty() ? 0.0
                   : static_cast<double>(snippets.size()) /
                         static_cast<double>(used.size());
  for (auto i : used)
    f.maxrule = std::max(f.maxrule, rewrites.at(i).weight);
  for (double w : weight_classes)
    f.rulescore[rulescore_name(w)] = 0;
  for (const auto &s : snippets) {
    const auto &r = rewrites.at(s.rewrite_index);
    if (r.kind == rewrite_kind::phrasal)
      ++f.totnonbagsnips;
    f.rulescore[rulescore_name(r.weight)] += count_ngram_occurrences(s, mining);
  }
  f.numngrams = comp.mined;

  const auto &ranked = comp.ranked;
  if (ranked.size() >= 2)
    f.diff_scores_1_2 = ranked[0].score - ranked[1].score;
  std::size_t top = std::min<std::size_t>(5, ranked.size());
  if (top > 0) {
    double mean = 0.0;
    for (std::size_t i = 0; i < top; ++i)
      mean += ranked[i].score;
    mean /= static_cast<double>(top);
    double var = 0.0;
    for (std::size_t i = 0; i < top; ++i)
      var += (ranked[i].score - mean) * (ranked[i].score - mean);
    f.std_deviation_answer_scores = std::sqrt(var / static_cast<double>(top));
  }

  f.filter = to_lower(to_string(q.type)) + "_filter";
  f.filter2 = "none";
  std::size_t most = 0;
  for (const auto &[name, count] : comp.fired)
    if (count > most) {
      most = count;
      f.filter2 = name;
    }
  return f;
}

feature_vector to_features(const run_features &f) {
  feature_vector fv{
      {"average_snippets_per_rewrite", f.average_snippets_per_rewrite},
      {"diff_scores_1_2", f.diff_scores_1_2},
      {"filter", f.filter},
      {"filter2", f.filter2},
      {"maxrule", f.maxrule},
      {"numngrams", static_cast<double>(f.numngrams)},
      {"std_deviation_answer_scores", f.std_deviation_answer_scores},
      {"totalqueries", static_cast<double>(f.totalqueries)},
      {"totnonbagsnips", static_cast<double>(f.totnonbagsnips)},
      {"totsnips", static_cast<double>(f.totsnips)},
  };
  for (const auto &[name, count] : f.rulescore)
    fv[name] = static_cast<double>(count);
  return fv;
}

const std::vector<int> &default_thresholds() {
  static const std::vector<int> t = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20};
  return t;
}

std::vector<int> threshold_ensemble::thresholds() const {
  std::vector<int> out;
  for (const auto &[n, _] : trees_)
    out.push_back(n);
  return out;
}

double threshold_ensemble::probability(int threshold, const feature_vector &fv) const {
  auto it = trees_.find(threshold);
  if (it == trees_.end())
    throw incomplete_ensemble("no model for threshold " + std::to_string(threshold));
  return it->second.predict(fv);
}

void threshold_ensemble::require(const std::vector<int> &thresholds) const {
  for (int n : thresholds)
    if (!trees_.count(n))
      throw incomplete_ensemble("no model for threshold " + std::to_string(n));
}

json threshold_ensemble::to_json() const {
  json j;
  j["format"] = "webqa-ensemble";
  j["version"] = 1;
  auto &trees = j["thresholds"] = json::object();
  for (const auto &[n, t] : trees_)
    trees[std::to_string(n)] = t.to_json();
  return j;
}

threshold_ensemble threshold_ensemble::from_json(const json &j) {
  try {
    if (j.at("format") != "webqa-ensemble")
      throw model_format_error("not an ensemble model");
    std::map<int, decision_tree> trees;
    for (const auto &[key, t] : j.at("thresholds").items())
      trees.emplace(std::stoi(key), decision_tree::from_json(t));
    return threshold_ensemble(std::move(trees));
  } catch (const json::exception &e) {
    throw model_format_error(std::string("malformed ensemble: ") + e.what());
  } catch (const std::invalid_argument &) {
    throw model_format_error("ensemble threshold keys must be integers");
  }
}

void threshold_ensemble::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out)
    throw error("cannot write model: " + path);
  out << to_json().dump(2) << '\n';
}

threshold_ensemble threshold_ensemble::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw model_format_error("cannot open model: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw model_format_error("malformed model " + path + ": " + e.what());
  }
  return from_json(j);
}

threshold_ensemble
train_threshold_ensemble(const std::map<int, std::vector<training_case>> &runs,
                         const std::vector<int> &thresholds,
                         const tree_config &cfg) {
  for (int n : thresholds) {
    auto it = runs.find(n);
    if (it == runs.end() || it->second.empty())
      throw incomplete_ensemble("no training runs for threshold " + std::to_string(n));
  }
  std::map<int, decision_tree> trees;
  for (int n : thresholds)
    trees.emplace(n, train_tree(runs.at(n), cfg));
  return threshold_ensemble(std::move(trees));
}

} // namespace webqa
