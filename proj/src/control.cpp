#include "webqa/control.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "webqa/error.hpp"

namespace webqa {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace

void preferences::validate() const {
  if (!(k > 0.0))
    throw config_error("preference k must be positive");
  if (!(c > 0.0))
    throw config_error("preference c must be positive");
}

double net_expected_value(double p, int n, const preferences &prefs) {
  return prefs.c * (p * prefs.k - static_cast<double>(n));
}

budget_decision choose_n(const std::map<int, double> &probability_by_threshold,
                         const preferences &prefs) {
  prefs.validate();
  if (probability_by_threshold.empty())
    throw incomplete_ensemble("no thresholds to choose from");
  budget_decision d;
  d.probability = probability_by_threshold;
  bool first = true;
  double best = 0.0;
  for (const auto &[n, p] : probability_by_threshold) {
    double net = net_expected_value(p, n, prefs);
    d.per_threshold_net[n] = net;
    if (first || net > best) {
      best = net;
      d.n = n;
      first = false;
    }
  }
  if (best < 0.0) {
    d.abstain = true;
    d.n = 0;
    d.expected_net = 0.0;
  } else {
    d.expected_net = best;
  }
  return d;
}

budget_decision choose_n(const budget_model &model, const feature_vector &fv,
                         const preferences &prefs,
                         const std::vector<int> &thresholds) {
  std::map<int, double> p;
  for (int n : thresholds)
    p[n] = model.probability(n, fv);
  return choose_n(p, prefs);
}

std::string_view to_string(policy_kind k) {
  switch (k) {
  case policy_kind::random_n: return "random";
  case policy_kind::likelihood_n: return "likelihood";
  case policy_kind::conjunctive_only: return "conjunctive";
  case policy_kind::all_rewrites: return "all";
  case policy_kind::cost_benefit: return "cost-benefit";
  }
  return "all";
}

std::optional<policy_kind> parse_policy_kind(std::string_view name) {
  for (auto k : {policy_kind::random_n, policy_kind::likelihood_n,
                 policy_kind::conjunctive_only, policy_kind::all_rewrites,
                 policy_kind::cost_benefit})
    if (to_string(k) == name)
      return k;
  return std::nullopt;
}

std::string policy_spec::id() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
  case policy_kind::random_n: os << '-' << n << "-s" << seed; break;
  case policy_kind::likelihood_n: os << '-' << n; break;
  case policy_kind::cost_benefit: os << "-k" << prefs.k << "-c" << prefs.c; break;
  default: break;
  }
  return os.str();
}

std::optional<std::string> question_result::top_answer() const {
  if (abstained || comp.ranked.empty())
    return std::nullopt;
  return comp.ranked.front().text();
}

weight_map weights_of(const std::vector<rewrite> &rewrites) {
  weight_map w;
  for (std::size_t i = 0; i < rewrites.size(); ++i)
    w[i] = rewrites[i].weight;
  return w;
}

std::vector<double> weight_classes(const rewrite_config &cfg) {
  std::vector<double> w{cfg.conjunctive_weight, cfg.phrasal_weight};
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

std::vector<double> quality_scores(const std::vector<rewrite> &rewrites,
                                   const model_set &models,
                                   const pipeline_config &cfg) {
  if (!models.conj || !models.phrasal)
    throw config_error("query-quality models are required for this policy");
  std::vector<double> scores;
  scores.reserve(rewrites.size());
  for (const auto &r : rewrites)
    scores.push_back(score_rewrite(*models.conj, *models.phrasal, r,
                                   scorer_of(cfg), *cfg.stop));
  return scores;
}

const grammar_scorer &scorer_of(const pipeline_config &cfg) {
  static const heuristic_grammar_scorer fallback;
  return cfg.scorer ? *cfg.scorer : fallback;
}

compose_options compose_options_for(const question &q, const pipeline_config &cfg) {
  compose_options o;
  o.mining = mining_options_for(q, *cfg.stop);
  o.filters = cfg.filters;
  return o;
}

question_result run_policy(const policy_spec &policy, std::string_view question_text,
                           const search_provider &backend, const model_set &models,
                           const pipeline_config &cfg) {
  question_result res;
  res.q = make_question(question_text);
  res.rewrites = generate_rewrites(res.q, cfg.rewrites);
  const auto weights = weights_of(res.rewrites);
  const auto copts = compose_options_for(res.q, cfg);
  const std::size_t avail = res.rewrites.size();

  std::vector<snippet> snippets;
  auto submit = [&](std::size_t idx) {
    ++res.queries_issued;
    res.submitted.push_back(idx);
    try {
      auto got = backend.execute(res.rewrites[idx], idx, cfg.limit);
      snippets.insert(snippets.end(), std::make_move_iterator(got.begin()),
                      std::make_move_iterator(got.end()));
    } catch (const error &e) {
      res.errors.push_back("rewrite " + std::to_string(idx) + ": " + e.what());
    }
  };

  switch (policy.kind) {
  case policy_kind::random_n: {
    std::vector<std::size_t> pool(avail);
    for (std::size_t i = 0; i < avail; ++i)
      pool[i] = i;
    auto h = fnv1a(res.q.raw_text);
    std::seed_seq seq{static_cast<std::uint32_t>(policy.seed),
                      static_cast<std::uint32_t>(policy.seed >> 32),
                      static_cast<std::uint32_t>(h),
                      static_cast<std::uint32_t>(h >> 32)};
    std::mt19937_64 rng(seq);
    std::size_t take = std::min(policy.n, avail);
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, avail - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
    for (auto i : pool)
      submit(i);
    break;
  }
  case policy_kind::likelihood_n: {
    res.quality = quality_scores(res.rewrites, models, cfg);
    auto order = order_rewrites(res.rewrites, res.quality);
    std::size_t take = std::min(policy.n, avail);
    for (std::size_t i = 0; i < take; ++i)
      submit(order[i]);
    break;
  }
  case policy_kind::conjunctive_only:
    for (std::size_t i = 0; i < avail; ++i)
      if (res.rewrites[i].kind == rewrite_kind::conjunctive)
        submit(i);
    break;
  case policy_kind::all_rewrites:
    for (std::size_t i = 0; i < avail; ++i)
      submit(i);
    break;
  case policy_kind::cost_benefit: {
    if (!models.budget)
      throw config_error("cost-benefit policy needs threshold models");
    res.quality = quality_scores(res.rewrites, models, cfg);
    auto order = order_rewrites(res.rewrites, res.quality);
    std::size_t probe = std::min(std::max<std::size_t>(cfg.probe_size, 1), avail);
    for (std::size_t i = 0; i < probe; ++i)
      submit(order[i]);
    auto probe_comp = compose(snippets, weights, res.q.type, copts);
    std::vector<std::size_t> used(order.begin(),
                                  order.begin() + static_cast<long>(probe));
    res.probe_features =
        extract_run_features(res.q, res.rewrites, used, snippets, probe_comp,
                             weight_classes(cfg.rewrites), copts.mining);
    res.decision = choose_n(*models.budget, to_features(*res.probe_features),
                            policy.prefs, cfg.thresholds);
    if (res.decision->abstain) {
      res.abstained = true;
      res.comp = std::move(probe_comp);
      return res;
    }
    std::size_t total = std::min(static_cast<std::size_t>(res.decision->n), avail);
    if (total <= probe) {
      res.comp = std::move(probe_comp);
      return res;
    }
    for (std::size_t i = probe; i < total; ++i)
      submit(order[i]);
    break;
  }
  }

  res.comp = compose(snippets, weights, res.q.type, copts);
  return res;
}

} // namespace webqa
