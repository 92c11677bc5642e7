#include "webqa/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "webqa/error.hpp"

namespace webqa {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class F> void parallel_for(std::size_t count, std::size_t jobs, F fn) {
  if (jobs == 0)
    jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lk(failure_mu);
        if (!failure)
          failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

std::string fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

void print_table(std::ostream &os, const std::vector<std::string> &header,
                 const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i)
    width[i] = header[i].size();
  for (const auto &r : rows)
    for (std::size_t i = 0; i < r.size(); ++i)
      width[i] = std::max(width[i], r[i].size());
  auto line = [&](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i)
        os << "  ";
      if (i == 0)
        os << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
      else
        os << std::right << std::setw(static_cast<int>(width[i])) << cells[i];
    }
    os << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width)
    total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto &r : rows)
    line(r);
  os << std::left;
}

// Rewrites for one question, each executed at most once.
struct cached_question {
  question q;
  std::vector<rewrite> rewrites;
  std::vector<std::vector<snippet>> results;
  std::vector<bool> done;

  const std::vector<snippet> &run(std::size_t i, const search_provider &backend,
                                  std::size_t limit) {
    if (!done[i]) {
      try {
        results[i] = backend.execute(rewrites[i], i, limit);
      } catch (const error &) {
        results[i].clear();
      }
      done[i] = true;
    }
    return results[i];
  }

  std::optional<std::string> answer(const std::vector<std::size_t> &used,
                                    const search_provider &backend,
                                    const pipeline_config &cfg) {
    std::vector<snippet> snippets;
    for (auto i : used) {
      const auto &got = run(i, backend, cfg.limit);
      snippets.insert(snippets.end(), got.begin(), got.end());
    }
    auto comp = compose(snippets, weights_of(rewrites), q.type,
                        compose_options_for(q, cfg));
    if (comp.ranked.empty())
      return std::nullopt;
    return comp.ranked.front().text();
  }
};

cached_question prepare(const qa_item &item, const pipeline_config &cfg) {
  cached_question c;
  c.q = make_question(item.question);
  c.rewrites = generate_rewrites(c.q, cfg.rewrites);
  c.results.resize(c.rewrites.size());
  c.done.assign(c.rewrites.size(), false);
  return c;
}

} // namespace

qa_item::qa_item(std::string q, std::vector<std::string> pats)
    : question(std::move(q)), patterns(std::move(pats)) {
  if (patterns.empty())
    throw config_error("question has no answer patterns");
  for (const auto &p : patterns) {
    try {
      compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error &e) {
      throw config_error("bad answer pattern '" + p + "': " + e.what());
    }
  }
}

std::vector<qa_item> parse_dataset(std::istream &in) {
  std::vector<qa_item> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty())
      continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("question") || !j["question"].is_string())
        throw dataset_parse_error(lineno, "missing string field 'question'");
      if (!j.contains("patterns") || !j["patterns"].is_array())
        throw dataset_parse_error(lineno, "missing array field 'patterns'");
      std::vector<std::string> pats;
      for (const auto &p : j["patterns"]) {
        if (!p.is_string())
          throw dataset_parse_error(lineno, "patterns must be strings");
        pats.push_back(p.get<std::string>());
      }
      items.emplace_back(j["question"].get<std::string>(), std::move(pats));
    } catch (const nlohmann::json::exception &e) {
      throw dataset_parse_error(lineno, e.what());
    } catch (const config_error &e) {
      throw dataset_parse_error(lineno, e.what());
    }
  }
  return items;
}

std::vector<qa_item> load_dataset(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw dataset_parse_error(0, "cannot open " + path);
  return parse_dataset(in);
}

void write_dataset(std::ostream &out, const std::vector<qa_item> &items) {
  for (const auto &it : items)
    out << nlohmann::json{{"question", it.question}, {"patterns", it.patterns}}.dump()
        << '\n';
}

void save_dataset(const std::string &path, const std::vector<qa_item> &items) {
  std::ofstream out(path);
  if (!out)
    throw config_error("cannot write " + path);
  write_dataset(out, items);
}

std::string_view to_string(verdict v) {
  switch (v) {
  case verdict::correct: return "CORRECT";
  case verdict::incorrect: return "INCORRECT";
  case verdict::abstained: return "ABSTAINED";
  }
  return "INCORRECT";
}

verdict judge(const std::optional<std::string> &top_answer, const qa_item &item) {
  if (!top_answer)
    return verdict::abstained;
  std::string a = trim(*top_answer);
  for (const auto &re : item.compiled())
    if (std::regex_match(a, re))
      return verdict::correct;
  return verdict::incorrect;
}

bool report::consistent() const {
  std::size_t sum = 0;
  for (const auto &r : records)
    sum += r.queries_issued;
  return correct + incorrect + abstained == total_questions &&
         records.size() == total_questions && sum == total_cost &&
         backend_calls == total_cost;
}

nlohmann::json report::to_json(bool with_records) const {
  nlohmann::json j{{"policy", policy},
                   {"total_cost", total_cost},
                   {"correct", correct},
                   {"incorrect", incorrect},
                   {"abstained", abstained},
                   {"total_questions", total_questions},
                   {"backend_calls", backend_calls}};
  if (with_records) {
    auto &arr = j["records"] = nlohmann::json::array();
    for (const auto &r : records) {
      nlohmann::json q{{"index", r.index},
                       {"question", r.question},
                       {"answer", r.answer ? nlohmann::json(*r.answer) : nlohmann::json()},
                       {"verdict", to_string(r.outcome)},
                       {"queries_issued", r.queries_issued}};
      if (r.chosen_n)
        q["chosen_n"] = *r.chosen_n;
      if (!r.errors.empty())
        q["errors"] = r.errors;
      arr.push_back(std::move(q));
    }
  }
  return j;
}

report evaluate(const policy_spec &policy, const std::vector<qa_item> &dataset,
                const search_provider &backend, const model_set &models,
                const eval_options &opts) {
  metered_provider meter(backend);
  std::vector<question_record> records(dataset.size());
  parallel_for(dataset.size(), opts.jobs, [&](std::size_t i) {
    question_record rec;
    rec.index = i;
    rec.question = dataset[i].question;
    try {
      auto res = run_policy(policy, dataset[i].question, meter, models, opts.pipeline);
      rec.queries_issued = res.queries_issued;
      rec.errors = std::move(res.errors);
      if (res.decision && !res.decision->abstain)
        rec.chosen_n = res.decision->n;
      if (res.abstained) {
        rec.outcome = verdict::abstained;
      } else {
        rec.answer = res.top_answer();
        rec.outcome = judge(rec.answer, dataset[i]);
      }
    } catch (const empty_question &e) {
      rec.errors.emplace_back(e.what());
      rec.outcome = verdict::incorrect;
    }
    records[i] = std::move(rec);
  });

  report rep;
  rep.policy = policy.id();
  rep.total_questions = dataset.size();
  for (const auto &r : records) {
    rep.total_cost += r.queries_issued;
    switch (r.outcome) {
    case verdict::correct: ++rep.correct; break;
    case verdict::incorrect: ++rep.incorrect; break;
    case verdict::abstained: ++rep.abstained; break;
    }
  }
  rep.backend_calls = meter.calls();
  rep.records = std::move(records);
  return rep;
}

std::vector<report> sweep_k(const std::vector<double> &ks, double c,
                            const std::vector<qa_item> &dataset,
                            const search_provider &backend,
                            const model_set &models, const eval_options &opts) {
  if (ks.empty())
    throw config_error("empty k sweep");
  std::vector<report> out;
  for (double k : ks) {
    preferences p{k, c};
    p.validate();
    out.push_back(evaluate(policy_spec::cost_benefit(p), dataset, backend, models, opts));
  }
  return out;
}

n_sweep sweep_n(const std::vector<int> &ns, const std::vector<std::uint64_t> &seeds,
                const std::vector<qa_item> &dataset, const search_provider &backend,
                const model_set &models, const eval_options &opts) {
  if (ns.empty() || seeds.empty())
    throw config_error("empty N sweep");
  n_sweep out;
  for (int n : ns) {
    if (n < 1)
      throw config_error("rewrite budgets must be positive");
    n_sweep_row row;
    row.n = n;
    for (auto seed : seeds) {
      auto r = evaluate(policy_spec::random(static_cast<std::size_t>(n), seed),
                        dataset, backend, models, opts);
      row.random_correct += static_cast<double>(r.correct);
      row.random_cost += static_cast<double>(r.total_cost);
      out.reports.push_back(std::move(r));
    }
    row.random_correct /= static_cast<double>(seeds.size());
    row.random_cost /= static_cast<double>(seeds.size());
    auto l = evaluate(policy_spec::likelihood(static_cast<std::size_t>(n)), dataset,
                      backend, models, opts);
    row.likelihood_correct = l.correct;
    row.likelihood_cost = l.total_cost;
    out.reports.push_back(std::move(l));
    out.rows.push_back(row);
  }
  return out;
}

void print_reports(std::ostream &os, const std::vector<report> &reports) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &r : reports)
    rows.push_back({r.policy, std::to_string(r.total_cost), std::to_string(r.correct),
                    std::to_string(r.incorrect), std::to_string(r.abstained),
                    std::to_string(r.total_questions)});
  print_table(os, {"policy", "cost", "correct", "incorrect", "abstained", "questions"},
              rows);
}

void print_k_sweep(std::ostream &os, const std::vector<double> &ks,
                   const std::vector<report> &reports) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < reports.size() && i < ks.size(); ++i) {
    std::ostringstream k;
    k << ks[i];
    rows.push_back({k.str(), std::to_string(reports[i].total_cost),
                    std::to_string(reports[i].correct),
                    std::to_string(reports[i].abstained)});
  }
  print_table(os, {"k", "cost", "correct", "abstained"}, rows);
}

void print_n_sweep(std::ostream &os, const n_sweep &sweep) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &r : sweep.rows)
    rows.push_back({std::to_string(r.n), fixed(r.random_cost, 1),
                    fixed(r.random_correct, 1), std::to_string(r.likelihood_cost),
                    std::to_string(r.likelihood_correct)});
  print_table(os,
              {"N", "random cost", "random correct", "likelihood cost",
               "likelihood correct"},
              rows);
}

void write_jsonl(std::ostream &os, const std::vector<report> &reports) {
  for (const auto &r : reports)
    os << r.to_json().dump() << '\n';
}

quality_runs collect_quality_runs(const std::vector<qa_item> &dataset,
                                  const search_provider &backend,
                                  const eval_options &opts) {
  const auto &cfg = opts.pipeline;
  std::vector<quality_runs> per(dataset.size());
  parallel_for(dataset.size(), opts.jobs, [&](std::size_t i) {
    auto c = prepare(dataset[i], cfg);
    for (std::size_t r = 0; r < c.rewrites.size(); ++r) {
      bool ok = judge(c.answer({r}, backend, cfg), dataset[i]) == verdict::correct;
      const auto &rw = c.rewrites[r];
      if (rw.kind == rewrite_kind::conjunctive)
        per[i].conjunctive.push_back(
            {to_features(extract_conj_features(rw, *cfg.stop)), ok});
      else
        per[i].phrasal.push_back(
            {to_features(extract_phrasal_features(rw, scorer_of(cfg), *cfg.stop)), ok});
    }
  });
  quality_runs out;
  for (auto &p : per) {
    std::move(p.conjunctive.begin(), p.conjunctive.end(),
              std::back_inserter(out.conjunctive));
    std::move(p.phrasal.begin(), p.phrasal.end(), std::back_inserter(out.phrasal));
  }
  return out;
}

std::map<int, std::vector<training_case>>
collect_threshold_runs(const std::vector<qa_item> &dataset,
                       const search_provider &backend, const model_set &models,
                       const eval_options &opts) {
  const auto &cfg = opts.pipeline;
  std::vector<std::map<int, training_case>> per(dataset.size());
  parallel_for(dataset.size(), opts.jobs, [&](std::size_t i) {
    auto c = prepare(dataset[i], cfg);
    auto order = order_rewrites(c.rewrites, quality_scores(c.rewrites, models, cfg));
    std::size_t probe = std::min(std::max<std::size_t>(cfg.probe_size, 1), order.size());
    std::vector<std::size_t> used(order.begin(), order.begin() + static_cast<long>(probe));
    std::vector<snippet> snippets;
    for (auto r : used) {
      const auto &got = c.run(r, backend, cfg.limit);
      snippets.insert(snippets.end(), got.begin(), got.end());
    }
    auto copts = compose_options_for(c.q, cfg);
    auto comp = compose(snippets, weights_of(c.rewrites), c.q.type, copts);
    auto fv = to_features(extract_run_features(c.q, c.rewrites, used, snippets, comp,
                                               weight_classes(cfg.rewrites),
                                               copts.mining));
    std::map<std::size_t, bool> by_count;
    for (int n : cfg.thresholds) {
      std::size_t take = std::min(static_cast<std::size_t>(n), order.size());
      auto it = by_count.find(take);
      if (it == by_count.end()) {
        std::vector<std::size_t> prefix(order.begin(),
                                        order.begin() + static_cast<long>(take));
        bool ok = judge(c.answer(prefix, backend, cfg), dataset[i]) == verdict::correct;
        it = by_count.emplace(take, ok).first;
      }
      per[i][n] = {fv, it->second};
    }
  });
  std::map<int, std::vector<training_case>> out;
  for (int n : cfg.thresholds)
    out[n];
  for (auto &p : per)
    for (auto &[n, tc] : p)
      out[n].push_back(std::move(tc));
  return out;
}

} // namespace webqa
