#include <doctest.h>

#include <numeric>
#include <random>

#include "test_util.hpp"
#include "webqa/control.hpp"
#include "webqa/error.hpp"
#include "webqa/models.hpp"

using namespace webqa;

namespace {

decision_tree constant_tree(double pos, double n) {
  std::vector<training_case> cases;
  for (int i = 0; i < n; ++i)
    cases.push_back({{{"numcap", 0.0}}, i < pos});
  return train_tree(cases);
}

} // namespace

TEST_CASE("score_rewrite dispatches on the rewrite kind") {
  auto conj = constant_tree(1, 4);    // 2/6
  auto phrasal = constant_tree(3, 4); // 4/6
  auto rs = generate_rewrites(make_question("Who killed Abraham Lincoln?"));
  heuristic_grammar_scorer g;
  CHECK(score_rewrite(conj, phrasal, rs.back(), g) == doctest::Approx(2.0 / 6.0));
  CHECK(score_rewrite(conj, phrasal, rs.front(), g) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("order_rewrites sorts by score, stable") {
  auto rs = generate_rewrites(make_question("Who killed Abraham Lincoln?"));
  rs.pop_back();
  CHECK(order_rewrites(rs, {0.2, 0.9, 0.5}) == std::vector<std::size_t>{1, 2, 0});
  CHECK(order_rewrites(rs, {0.5, 0.5, 0.5}) == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(order_rewrites(rs, {0.5}), length_mismatch);
}

TEST_CASE("order_rewrites prefixes maximize the score sum") {
  std::mt19937_64 rng(17);
  auto base = generate_rewrites(make_question("Who invented the big old steam engine?"));
  for (int round = 0; round < 50; ++round) {
    std::size_t m = 1 + rng() % 8;
    std::vector<rewrite> rs(base.begin(), base.begin() + static_cast<long>(std::min(m, base.size())));
    m = rs.size();
    std::vector<double> scores;
    for (std::size_t i = 0; i < m; ++i)
      scores.push_back(static_cast<double>(rng() % 5) / 4.0);
    auto order = order_rewrites(rs, scores);
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> iota(m);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    for (std::size_t n = 1; n <= m; ++n) {
      double prefix = 0;
      for (std::size_t i = 0; i < n; ++i)
        prefix += scores[order[i]];
      double best = 0;
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n)
          continue;
        double s = 0;
        for (std::size_t i = 0; i < m; ++i)
          if (mask & (1u << i))
            s += scores[i];
        best = std::max(best, s);
      }
      CHECK(prefix == best);
    }
  }
}

TEST_CASE("run features") {
  auto q = make_question("Who killed Abraham Lincoln?");
  auto rs = generate_rewrites(q);
  std::vector<snippet> snippets;
  for (int i = 0; i < 10; ++i)
    snippets.push_back({"John Wilkes Booth", "a", 0});
  for (int i = 0; i < 20; ++i)
    snippets.push_back({"bullet actor", "b", rs.size() - 1});
  composition comp;
  comp.ranked = {{{"x"}, 10, 1}, {{"y"}, 4, 1}, {{"z"}, 4, 1}};
  comp.mined = 17;
  comp.fired = {{"who_capitalized", 3}, {"who_date", 1}};
  std::vector<std::size_t> used{0, 1, rs.size() - 1};
  auto mining = mining_options_for(q);
  auto f = extract_run_features(q, rs, used, snippets, comp, {1.0, 5.0}, mining);
  CHECK(f.average_snippets_per_rewrite == 10.0);
  CHECK(f.diff_scores_1_2 == 6.0);
  CHECK(f.totsnips == 30);
  CHECK(f.totnonbagsnips == 10);
  CHECK(f.totalqueries == 3);
  CHECK(f.maxrule == 5.0);
  CHECK(f.numngrams == 17);
  CHECK(f.filter == "who_filter");
  CHECK(f.filter2 == "who_capitalized");
  CHECK(f.rulescore.at("rulescore_5") == 60);
  CHECK(f.rulescore.at("rulescore_1") == 60);
  CHECK(f.std_deviation_answer_scores ==
        doctest::Approx(std::sqrt((16.0 + 4.0 + 4.0) / 3.0)));
  auto fv = to_features(f);
  CHECK(std::get<std::string>(fv.at("filter")) == "who_filter");
  CHECK(std::get<double>(fv.at("rulescore_5")) == 60.0);
}

TEST_CASE("run features on an empty run") {
  auto q = make_question("Who killed Abraham Lincoln?");
  auto rs = generate_rewrites(q);
  auto f = extract_run_features(q, rs, {0}, {}, {}, {1.0, 5.0}, mining_options_for(q));
  CHECK(f.diff_scores_1_2 == 0.0);
  CHECK(f.std_deviation_answer_scores == 0.0);
  CHECK(f.filter2 == "none");
  CHECK(f.rulescore.size() == 2);
}

TEST_CASE("threshold ensemble") {
  std::map<int, std::vector<training_case>> runs;
  for (int n : default_thresholds())
    runs[n] = {{{{"totsnips", 1.0}}, true}, {{{"totsnips", 2.0}}, true}};
  auto ens = train_threshold_ensemble(runs);
  CHECK(ens.thresholds() == default_thresholds());
  for (const auto &[n, t] : ens.trees())
    CHECK(t.leaf_count() == 1);
  CHECK(ens.probability(12, {{"totsnips", 5.0}}) == doctest::Approx(0.75));
  CHECK_THROWS_AS(ens.probability(11, {}), incomplete_ensemble);

  test_util::temp_dir dir;
  ens.save(dir.file("e.json"));
  CHECK(threshold_ensemble::load(dir.file("e.json")).to_json() == ens.to_json());

  runs.erase(15);
  CHECK_THROWS_AS(train_threshold_ensemble(runs), incomplete_ensemble);
  runs[15] = {};
  CHECK_THROWS_AS(train_threshold_ensemble(runs), incomplete_ensemble);
}

TEST_CASE("default thresholds") {
  CHECK(default_thresholds() == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20});
}
