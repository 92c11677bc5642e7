#pragma once

// Test doubles for the search backend and the budget models.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>

#include "webqa/control.hpp"
#include "webqa/error.hpp"

namespace stub {

// Returns canned snippets per rewrite display string; optionally fails on
// selected rewrite indices.
class backend : public webqa::search_provider {
public:
  std::map<std::string, std::vector<std::string>> replies;
  std::set<std::size_t> failing;

  std::vector<webqa::snippet> execute(const webqa::rewrite &r, std::size_t idx,
                                      std::size_t limit) const override {
    {
      std::lock_guard lk(mu_);
      seen_.push_back(idx);
    }
    if (failing.count(idx))
      throw webqa::retryable_error("stub failure");
    std::vector<webqa::snippet> out;
    auto it = replies.find(r.display());
    if (it != replies.end())
      for (const auto &t : it->second)
        if (out.size() < limit)
          out.push_back({t, "stub", idx});
    return out;
  }

  std::vector<std::size_t> seen() const {
    std::lock_guard lk(mu_);
    return seen_;
  }

private:
  mutable std::mutex mu_;
  mutable std::vector<std::size_t> seen_;
};

// Budget model with a fixed probability per threshold.
class budget final : public webqa::budget_model {
public:
  std::map<int, double> p;

  std::vector<int> thresholds() const override {
    std::vector<int> t;
    for (const auto &[n, _] : p)
      t.push_back(n);
    return t;
  }
  double probability(int n, const webqa::feature_vector &) const override {
    auto it = p.find(n);
    if (it == p.end())
      throw webqa::incomplete_ensemble("stub has no threshold " + std::to_string(n));
    return it->second;
  }

  static budget constant(double value) {
    budget b;
    for (int n : webqa::default_thresholds())
      b.p[n] = value;
    return b;
  }
};

// Single-leaf tree predicting (pos+1)/(n+2) for any input.
inline webqa::decision_tree constant_tree(int pos, int n) {
  std::vector<webqa::training_case> cases;
  for (int i = 0; i < n; ++i)
    cases.push_back({{{"numcap", 0.0}}, i < pos});
  return webqa::train_tree(cases);
}

} // namespace stub
