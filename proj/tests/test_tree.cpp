#include <doctest.h>

#include <random>
#include <sstream>

#include "fuzz.hpp"
#include "oracles.hpp"
#include "test_util.hpp"
#include "webqa/error.hpp"
#include "webqa/tree.hpp"

using namespace webqa;

namespace {

training_case tc(double x, bool label) { return {{{"x", x}}, label}; }

} // namespace

TEST_CASE("uninformative data gives one Laplace leaf") {
  std::vector<training_case> cases{tc(1, true), tc(1, true), tc(1, true), tc(1, false)};
  auto t = train_tree(cases);
  CHECK(t.nodes().size() == 1);
  CHECK(t.predict({{"x", 9.0}}) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("separable feature gives a single split") {
  std::vector<training_case> cases;
  for (int i = 0; i < 6; ++i)
    cases.push_back(tc(1, true));
  for (int i = 0; i < 4; ++i)
    cases.push_back(tc(0, false));
  auto t = train_tree(cases);
  CHECK(t.depth() == 1);
  CHECK(t.nodes()[0].threshold == 0.5);
  CHECK(t.predict({{"x", 1.0}}) == doctest::Approx(7.0 / 8.0));
  CHECK(t.predict({{"x", 0.0}}) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("categorical one-vs-rest split") {
  std::vector<training_case> cases;
  for (int i = 0; i < 8; ++i) {
    cases.push_back({{{"c", std::string("who")}}, true});
    cases.push_back({{{"c", std::string("what")}}, false});
    cases.push_back({{{"c", std::string("when")}}, false});
  }
  auto t = train_tree(cases);
  REQUIRE_FALSE(t.nodes()[0].leaf);
  CHECK(t.nodes()[0].kind == feature_kind::categorical);
  CHECK(t.predict({{"c", std::string("who")}}) > 0.5);
  CHECK(t.predict({{"c", std::string("when")}}) < 0.5);
  CHECK(t.predict({{"c", std::string("never seen")}}) < 0.5);
}

TEST_CASE("training errors") {
  CHECK_THROWS_AS(train_tree({}), no_training_data);
  CHECK_THROWS_AS(train_tree({tc(1, true), {{{"y", 1.0}}, false}}), schema_mismatch);
  CHECK_THROWS_AS(train_tree({tc(1, true), {{{"x", std::string("a")}}, false}}),
                  schema_mismatch);
}

TEST_CASE("prediction errors") {
  std::vector<training_case> cases;
  for (int i = 0; i < 10; ++i)
    cases.push_back(tc(i, i >= 5));
  auto t = train_tree(cases);
  REQUIRE_FALSE(t.nodes()[0].leaf);
  CHECK_THROWS_AS(t.predict({{"y", 1.0}}), missing_feature);
  CHECK_THROWS_AS(t.predict({{"x", std::string("1")}}), schema_mismatch);
}

TEST_CASE("min_leaf and max_depth stop growth") {
  std::vector<training_case> cases;
  for (int i = 0; i < 40; ++i)
    cases.push_back(tc(i, (i / 5) % 2 == 0));
  tree_config shallow;
  shallow.max_depth = 1;
  CHECK(train_tree(cases, shallow).depth() <= 1);
  tree_config big_leaf;
  big_leaf.min_leaf = 100;
  CHECK(train_tree(cases, big_leaf).nodes().size() == 1);
}

TEST_CASE("leaves agree with the routing oracle") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 20; ++round) {
    auto cases = fuzz::training_cases(rng, 200);
    auto t = train_tree(cases);
    auto routed = oracle::route(t, cases);
    for (const auto &[leaf, counts] : routed) {
      const auto &node = t.nodes()[leaf];
      REQUIRE(node.leaf);
      CHECK(node.support == counts.first);
      CHECK(node.probability == (counts.second + 1.0) / (counts.first + 2.0));
    }
    for (const auto &c : cases) {
      double p = t.predict(c.features);
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
}

TEST_CASE("deeper trees never lose training log-likelihood") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 10; ++round) {
    auto cases = fuzz::training_cases(rng, 150);
    double prev = -INFINITY;
    for (std::size_t depth = 0; depth <= 6; ++depth) {
      tree_config cfg;
      cfg.max_depth = depth;
      double ll = log_likelihood(train_tree(cases, cfg), cases);
      CHECK(ll >= prev - 1e-9);
      prev = ll;
    }
  }
}

TEST_CASE("training is deterministic and serialization exact") {
  std::mt19937_64 rng(4);
  auto cases = fuzz::training_cases(rng, 120);
  auto a = train_tree(cases), b = train_tree(cases);
  CHECK(a.to_json() == b.to_json());
  test_util::temp_dir dir;
  a.save(dir.file("t.json"));
  auto back = decision_tree::load(dir.file("t.json"));
  CHECK(back.to_json() == a.to_json());
  for (const auto &c : cases)
    CHECK(back.predict(c.features) == a.predict(c.features));
  std::ostringstream os;
  a.print(os);
  CHECK(os.str().find("p=") != std::string::npos);
}

TEST_CASE("malformed tree models are rejected") {
  CHECK_THROWS_AS(decision_tree::from_json({{"format", "other"}}), model_format_error);
  tree_node bad;
  bad.probability = 1.0;
  CHECK_THROWS_AS(decision_tree({}, {bad}), model_format_error);
  CHECK_THROWS_AS(decision_tree({}, {}), model_format_error);
  tree_node root;
  root.leaf = false;
  root.feature = "x";
  root.left = 0;
  root.right = 0;
  CHECK_THROWS_AS(decision_tree({{"x", feature_kind::numeric}}, {root}), model_format_error);
}

TEST_CASE("feature vectors through JSON") {
  feature_vector fv{{"a", 1.5}, {"b", std::string("who_filter")}};
  CHECK(feature_vector_from_json(to_json(fv)) == fv);
  CHECK_THROWS_AS(feature_vector_from_json(nlohmann::json::array()), schema_mismatch);
  CHECK_THROWS_AS(feature_vector_from_json({{"a", true}}), schema_mismatch);
}

TEST_CASE("learner interface") {
  info_gain_learner learner;
  const tree_learner &l = learner;
  auto t = l.fit({tc(1, true), tc(2, false)});
  CHECK(t.leaf_count() == 1);
}
