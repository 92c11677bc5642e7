#include "webqa/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "webqa/bench.hpp"
#include "webqa/config.hpp"
#include "webqa/error.hpp"
#include "webqa/eval.hpp"
#include "webqa/remote.hpp"

namespace webqa {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// Flags that may also come from the config file. Values given on the
// command line are applied on top of the file.
class config_flags {
public:
  void attach_config(CLI::App *app) {
    app->add_option("--config", config_path_, "JSON config file");
  }

  template <class T, class F>
  CLI::Option *add(CLI::App *app, const std::string &name, const std::string &desc, F fn) {
    auto value = std::make_shared<T>();
    auto *opt = app->add_option(name, *value, desc);
    apply_.push_back([value, opt, fn](app_config &c) {
      if (opt->count())
        fn(c, *value);
    });
    return opt;
  }

  void backend(CLI::App *app) {
    add<std::string>(app, "--corpus", "JSONL corpus for the offline engine",
                     [](app_config &c, const std::string &v) {
                       c.corpus = v;
                       c.index.reset();
                       c.remote.endpoint.clear();
                     });
    add<std::string>(app, "--index", "serialized index for the offline engine",
                     [](app_config &c, const std::string &v) {
                       c.index = v;
                       c.corpus.reset();
                       c.remote.endpoint.clear();
                     });
    add<std::string>(app, "--endpoint", "HTTP search API endpoint",
                     [](app_config &c, const std::string &v) {
                       c.remote.endpoint = v;
                       c.corpus.reset();
                       c.index.reset();
                     });
    add<std::string>(app, "--token", "bearer token for the search API",
                     [](app_config &c, const std::string &v) { c.remote.bearer_token = v; });
    add<std::size_t>(app, "--limit", "snippets per rewrite",
                     [](app_config &c, std::size_t v) { c.limit = v; });
    add<std::size_t>(app, "--window", "snippet context words on each side",
                     [](app_config &c, std::size_t v) { c.window = v; });
    add<std::string>(app, "--stoplist", "stop-word list",
                     [](app_config &c, const std::string &v) { c.stoplist_path = v; });
    add<std::string>(app, "--filters", "answer filter table (JSON)",
                     [](app_config &c, const std::string &v) { c.filters_path = v; });
    add<std::size_t>(app, "--jobs", "questions processed in parallel",
                     [](app_config &c, std::size_t v) { c.jobs = v; });
  }

  void models(CLI::App *app) {
    add<std::string>(app, "--conj-model", "query-quality tree for conjunctive rewrites",
                     [](app_config &c, const std::string &v) { c.conj_model = v; });
    add<std::string>(app, "--phrasal-model", "query-quality tree for phrasal rewrites",
                     [](app_config &c, const std::string &v) { c.phrasal_model = v; });
    add<std::string>(app, "--ensemble", "threshold ensemble",
                     [](app_config &c, const std::string &v) { c.ensemble_model = v; });
    add<std::string>(app, "--thresholds", "comma-separated rewrite budgets",
                     [](app_config &c, const std::string &v) {
                       c.thresholds = parse_int_list(v);
                     });
    add<std::size_t>(app, "--probe", "rewrites run before the budget decision",
                     [](app_config &c, std::size_t v) { c.probe_size = v; });
  }

  void policy(CLI::App *app) {
    app->add_option("--policy", policy_name_,
                    "random | likelihood | conjunctive | all | cost-benefit")
        ->check(CLI::IsMember({"random", "likelihood", "conjunctive", "all", "cost-benefit"}));
    app->add_option("--n", n_, "rewrites for random and likelihood policies");
    add<double>(app, "--k", "answer value as a multiple of the query cost",
                [](app_config &c, double v) { c.prefs.k = v; });
    add<double>(app, "--c", "cost per query",
                [](app_config &c, double v) { c.prefs.c = v; });
    add<std::uint64_t>(app, "--seed", "random seed",
                       [](app_config &c, std::uint64_t v) { c.seed = v; });
  }

  void tree(CLI::App *app) {
    add<double>(app, "--min-gain", "minimum information gain per split",
                [](app_config &c, double v) { c.tree.min_gain = v; });
    add<std::size_t>(app, "--min-leaf", "minimum cases to attempt a split",
                     [](app_config &c, std::size_t v) { c.tree.min_leaf = v; });
    add<std::size_t>(app, "--max-depth", "maximum tree depth",
                     [](app_config &c, std::size_t v) { c.tree.max_depth = v; });
  }

  app_config resolve() const {
    app_config c = config_path_.empty() ? app_config{} : load_config(config_path_);
    for (const auto &f : apply_)
      f(c);
    c.validate();
    return c;
  }

  policy_spec make_policy(const app_config &c) const {
    auto kind = parse_policy_kind(policy_name_);
    if (!kind)
      throw config_error("unknown policy " + policy_name_);
    if ((*kind == policy_kind::random_n || *kind == policy_kind::likelihood_n) && n_ == 0)
      throw config_error("--n is required for the " + policy_name_ + " policy");
    policy_spec p;
    p.kind = *kind;
    p.n = n_;
    p.seed = c.seed;
    p.prefs = c.prefs;
    return p;
  }

  std::string policy_name_ = "all";
  std::size_t n_ = 0;

private:
  std::string config_path_;
  std::vector<std::function<void(app_config &)>> apply_;
};

// Everything a command needs once the configuration is settled.
struct runtime {
  app_config cfg;
  stoplist stop;
  filter_table filters;
  std::unique_ptr<heuristic_grammar_scorer> scorer;
  std::unique_ptr<search_provider> backend;
  std::optional<decision_tree> conj, phrasal;
  std::optional<threshold_ensemble> ensemble;

  explicit runtime(app_config c) : cfg(std::move(c)) {
    stop = cfg.stoplist_path ? stoplist::load(*cfg.stoplist_path) : stoplist::builtin();
    filters = cfg.filters_path ? filter_table::load(*cfg.filters_path) : filter_table::builtin();
    scorer = std::make_unique<heuristic_grammar_scorer>(stop);
  }

  void open_backend() {
    cfg.require_backend();
    if (cfg.corpus) {
      auto idx = std::make_shared<const inverted_index>(
          inverted_index::build(load_corpus(*cfg.corpus), cfg.window));
      backend = std::make_unique<offline_engine>(idx, stop);
    } else if (cfg.index) {
      auto idx = std::make_shared<const inverted_index>(inverted_index::load(*cfg.index));
      backend = std::make_unique<offline_engine>(idx, stop);
    } else {
      backend = std::make_unique<remote_provider>(cfg.remote);
    }
  }

  void load_models(bool quality, bool budget) {
    if (quality) {
      if (!cfg.conj_model || !cfg.phrasal_model)
        throw config_error("this policy needs --conj-model and --phrasal-model");
      conj = decision_tree::load(*cfg.conj_model);
      phrasal = decision_tree::load(*cfg.phrasal_model);
    }
    if (budget) {
      if (!cfg.ensemble_model)
        throw config_error("this policy needs --ensemble");
      ensemble = threshold_ensemble::load(*cfg.ensemble_model);
      ensemble->require(cfg.thresholds);
    }
  }

  void load_models_for(policy_kind k) {
    load_models(k == policy_kind::likelihood_n || k == policy_kind::cost_benefit,
                k == policy_kind::cost_benefit);
  }

  pipeline_config pipeline() const {
    pipeline_config p;
    p.rewrites = cfg.rewrites;
    p.limit = cfg.limit;
    p.stop = &stop;
    p.filters = &filters;
    p.scorer = scorer.get();
    p.thresholds = cfg.thresholds;
    p.probe_size = cfg.probe_size;
    return p;
  }

  model_set models() const {
    return {conj ? &*conj : nullptr, phrasal ? &*phrasal : nullptr,
            ensemble ? &*ensemble : nullptr};
  }

  eval_options eval() const {
    eval_options o;
    o.pipeline = pipeline();
    std::size_t jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    if (!cfg.remote.endpoint.empty())
      jobs = std::min(jobs, std::max<std::size_t>(cfg.remote.max_in_flight, 1));
    o.jobs = jobs;
    return o;
  }
};

void write_file(const std::string &path, const std::function<void(std::ostream &)> &fn) {
  std::ofstream out(path);
  if (!out)
    throw config_error("cannot write " + path);
  fn(out);
  if (!out)
    throw config_error("failed writing " + path);
}

int cmd_index(const std::string &corpus, const std::string &out_path, std::size_t window,
              std::ostream &out) {
  auto idx = inverted_index::build(load_corpus(corpus), window);
  idx.save(out_path);
  out << "indexed " << idx.size() << " documents into " << out_path << '\n';
  return exit_ok;
}

void print_budget_table(std::ostream &out, const budget_decision &d, const preferences &prefs) {
  out << "budget   p(correct)   expected value   cost      net\n";
  for (const auto &[n, net] : d.per_threshold_net) {
    double p = d.probability.at(n);
    out << std::setw(6) << n << "   " << std::setw(10) << fixed(p, 3) << "   "
        << std::setw(14) << fixed(p * prefs.k * prefs.c, 3) << "   " << std::setw(6)
        << fixed(n * prefs.c, 2) << "   " << std::setw(7) << fixed(net, 3)
        << (!d.abstain && n == d.n ? "  *" : "") << '\n';
  }
}

int cmd_ask(const std::string &text, const config_flags &flags, std::size_t top,
            std::ostream &out) {
  runtime rt(flags.resolve());
  auto policy = flags.make_policy(rt.cfg);
  rt.load_models_for(policy.kind);
  rt.open_backend();
  auto res = run_policy(policy, text, *rt.backend, rt.models(), rt.pipeline());

  out << "question: " << res.q.raw_text << '\n';
  out << "type: " << to_string(res.q.type) << '\n';
  out << "policy: " << policy.id() << '\n';
  out << "rewrites:\n";
  for (std::size_t i = 0; i < res.rewrites.size(); ++i) {
    bool sent = std::find(res.submitted.begin(), res.submitted.end(), i) != res.submitted.end();
    out << "  [" << i << "] " << res.rewrites[i].display() << "  weight "
        << res.rewrites[i].weight;
    if (!res.quality.empty())
      out << "  quality " << fixed(res.quality[i], 3);
    if (sent)
      out << "  submitted";
    out << '\n';
  }
  if (res.decision) {
    print_budget_table(out, *res.decision, policy.prefs);
    if (res.decision->abstain)
      out << "decision: ABSTAIN\n";
    else
      out << "decision: SUBMIT " << res.decision->n << '\n';
  }
  out << "queries issued: " << res.queries_issued << '\n';
  for (const auto &e : res.errors)
    out << "backend error: " << e << '\n';

  if (res.abstained) {
    out << "status: ABSTAINED\n";
    out << "No search budget is expected to pay off for this question. "
           "Please rephrase it, for example with more specific names or terms.\n";
    return exit_ok;
  }
  if (res.queries_issued > 0 && res.errors.size() == res.queries_issued) {
    out << "status: BACKEND_ERROR\n";
    return exit_backend;
  }
  if (res.comp.ranked.empty()) {
    out << "status: NO_ANSWER\n";
    return exit_ok;
  }
  out << "status: ANSWERED\n";
  out << "answers:\n";
  for (std::size_t i = 0; i < res.comp.ranked.size() && i < top; ++i)
    out << "  " << i + 1 << ". " << res.comp.ranked[i].text() << "  ("
        << res.comp.ranked[i].score << ")\n";
  return exit_ok;
}

std::vector<json> read_jsonl(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw dataset_parse_error(0, "cannot open " + path);
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception &e) {
      throw dataset_parse_error(lineno, e.what());
    }
  }
  return rows;
}

training_case case_from_json(const json &row) {
  try {
    return {feature_vector_from_json(row.at("features")), row.at("label").get<bool>()};
  } catch (const json::exception &e) {
    throw schema_mismatch(std::string("bad training row: ") + e.what());
  }
}

int cmd_train(const std::string &runs, const std::string &kind, const std::string &out_path,
              const config_flags &flags, std::ostream &out) {
  auto cfg = flags.resolve();
  auto rows = read_jsonl(runs);
  if (kind == "thresholds") {
    std::map<int, std::vector<training_case>> by_n;
    for (const auto &row : rows) {
      if (!row.contains("threshold"))
        throw schema_mismatch("threshold run without a 'threshold' field");
      by_n[row["threshold"].get<int>()].push_back(case_from_json(row));
    }
    auto ens = train_threshold_ensemble(by_n, cfg.thresholds, cfg.tree);
    ens.save(out_path);
    for (const auto &[n, tree] : ens.trees())
      out << "budget " << n << ": " << tree.nodes().front().support << " runs, depth "
          << tree.depth() << ", " << tree.leaf_count() << " leaves\n";
    out << "wrote " << ens.trees().size() << " models to " << out_path << '\n';
    return exit_ok;
  }
  std::vector<training_case> cases;
  for (const auto &row : rows)
    if (!row.contains("model") || row["model"] == kind)
      cases.push_back(case_from_json(row));
  auto tree = train_tree(cases, cfg.tree);
  tree.save(out_path);
  tree.print(out);
  out << "wrote " << kind << " model (" << cases.size() << " cases) to " << out_path << '\n';
  return exit_ok;
}

int cmd_evaluate(const std::string &dataset_path, const config_flags &flags,
                 const std::string &sweep_k_list, bool sweep_n_flag, const std::string &ns,
                 std::size_t seeds, const std::string &out_path, std::ostream &out) {
  runtime rt(flags.resolve());
  auto dataset = load_dataset(dataset_path);
  if (dataset.empty())
    throw dataset_parse_error(0, dataset_path + " contains no questions");
  auto opts = rt.eval();
  std::vector<report> reports;

  if (!sweep_k_list.empty()) {
    auto ks = parse_double_list(sweep_k_list);
    rt.load_models_for(policy_kind::cost_benefit);
    rt.open_backend();
    reports = sweep_k(ks, rt.cfg.prefs.c, dataset, *rt.backend, rt.models(), opts);
    print_k_sweep(out, ks, reports);
  } else if (sweep_n_flag) {
    auto budgets = ns.empty() ? rt.cfg.thresholds : parse_int_list(ns);
    if (seeds == 0)
      throw config_error("--seeds must be positive");
    std::vector<std::uint64_t> seed_list;
    for (std::size_t i = 0; i < seeds; ++i)
      seed_list.push_back(rt.cfg.seed + i);
    rt.load_models_for(policy_kind::likelihood_n);
    rt.open_backend();
    auto sweep = sweep_n(budgets, seed_list, dataset, *rt.backend, rt.models(), opts);
    print_n_sweep(out, sweep);
    reports = std::move(sweep.reports);
  } else {
    auto policy = flags.make_policy(rt.cfg);
    rt.load_models_for(policy.kind);
    rt.open_backend();
    reports.push_back(evaluate(policy, dataset, *rt.backend, rt.models(), opts));
    print_reports(out, reports);
  }
  if (!out_path.empty())
    write_file(out_path, [&](std::ostream &os) { write_jsonl(os, reports); });
  return exit_ok;
}

int cmd_gen_bench(const bench_options &opts, const std::string &dir, std::ostream &out) {
  auto b = generate_benchmark(opts);
  fs::create_directories(dir);
  save_corpus((fs::path(dir) / "corpus.jsonl").string(), b.corpus);
  save_dataset((fs::path(dir) / "train.jsonl").string(), b.train);
  save_dataset((fs::path(dir) / "test.jsonl").string(), b.test);
  out << "wrote " << b.corpus.size() << " documents, " << b.train.size()
      << " training and " << b.test.size() << " test questions to " << dir << '\n';
  return exit_ok;
}

int cmd_collect(const std::string &dataset_path, const std::string &phase,
                const std::string &out_path, const config_flags &flags, std::ostream &out) {
  runtime rt(flags.resolve());
  auto dataset = load_dataset(dataset_path);
  if (dataset.empty())
    throw dataset_parse_error(0, dataset_path + " contains no questions");
  auto opts = rt.eval();
  std::size_t written = 0;
  if (phase == "quality") {
    rt.open_backend();
    auto runs = collect_quality_runs(dataset, *rt.backend, opts);
    write_file(out_path, [&](std::ostream &os) {
      for (const auto &c : runs.conjunctive)
        os << json{{"model", "quality-conj"}, {"features", to_json(c.features)},
                   {"label", c.label}}.dump() << '\n';
      for (const auto &c : runs.phrasal)
        os << json{{"model", "quality-phrasal"}, {"features", to_json(c.features)},
                   {"label", c.label}}.dump() << '\n';
    });
    written = runs.conjunctive.size() + runs.phrasal.size();
  } else {
    rt.load_models(true, false);
    rt.open_backend();
    auto runs = collect_threshold_runs(dataset, *rt.backend, rt.models(), opts);
    write_file(out_path, [&](std::ostream &os) {
      for (const auto &[n, cases] : runs)
        for (const auto &c : cases) {
          os << json{{"threshold", n}, {"features", to_json(c.features)},
                     {"label", c.label}}.dump() << '\n';
          ++written;
        }
    });
  }
  out << "wrote " << written << " training runs to " << out_path << '\n';
  return exit_ok;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Answer factoid questions from search-engine snippets"};
  app.name("webqa");
  app.require_subcommand(1);

  auto *index = app.add_subcommand("index", "build and save an offline index");
  std::string corpus, index_out;
  std::size_t window = default_window;
  index->add_option("--corpus", corpus, "JSONL corpus")->required();
  index->add_option("--out", index_out, "index file to write")->required();
  index->add_option("--window", window, "snippet context words on each side");

  auto *ask = app.add_subcommand("ask", "answer one question");
  config_flags ask_flags;
  std::string question;
  std::size_t top = 5;
  ask->add_option("question", question, "the question")->required();
  ask->add_option("--top", top, "answers to print");
  ask_flags.attach_config(ask);
  ask_flags.backend(ask);
  ask_flags.models(ask);
  ask_flags.policy(ask);

  auto *train = app.add_subcommand("train", "train a model from collected runs");
  config_flags train_flags;
  std::string runs, kind, model_out;
  train->add_option("--runs", runs, "JSONL training runs")->required();
  train->add_option("--kind", kind, "quality-conj | quality-phrasal | thresholds")
      ->required()
      ->check(CLI::IsMember({"quality-conj", "quality-phrasal", "thresholds"}));
  train->add_option("--out", model_out, "model file to write")->required();
  train_flags.attach_config(train);
  train_flags.tree(train);
  train_flags.add<std::string>(train, "--thresholds", "comma-separated rewrite budgets",
                               [](app_config &c, const std::string &v) {
                                 c.thresholds = parse_int_list(v);
                               });

  auto *evaluate_cmd = app.add_subcommand("evaluate", "run a policy over a dataset");
  config_flags eval_flags;
  std::string dataset, sweep_k_list, ns, report_out;
  bool sweep_n_flag = false;
  std::size_t seeds = 5;
  evaluate_cmd->add_option("--dataset", dataset, "JSONL questions with answer patterns")
      ->required();
  evaluate_cmd->add_option("--sweep-k", sweep_k_list, "cost-benefit runs for these k values");
  evaluate_cmd->add_flag("--sweep-n", sweep_n_flag, "random vs likelihood ordering per budget");
  evaluate_cmd->add_option("--ns", ns, "budgets for --sweep-n (default: thresholds)");
  evaluate_cmd->add_option("--seeds", seeds, "random-order seeds for --sweep-n");
  evaluate_cmd->add_option("--out", report_out, "JSON-lines report file");
  eval_flags.attach_config(evaluate_cmd);
  eval_flags.backend(evaluate_cmd);
  eval_flags.models(evaluate_cmd);
  eval_flags.policy(evaluate_cmd);

  auto *gen = app.add_subcommand("gen-bench", "write a synthetic benchmark");
  bench_options bopts;
  std::string bench_dir;
  gen->add_option("--out-dir", bench_dir, "output directory")->required();
  gen->add_option("--facts", bopts.facts, "number of facts (questions)");
  gen->add_option("--redundancy", bopts.max_redundancy, "max paraphrase documents per fact");
  gen->add_option("--distractors", bopts.max_distractors, "max misleading documents per fact");
  gen->add_option("--unanswerable", bopts.unanswerable, "share of facts without support")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--train-fraction", bopts.train_fraction, "share of training questions")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", bopts.seed, "random seed");

  auto *collect = app.add_subcommand("collect-runs", "record training runs for the models");
  config_flags collect_flags;
  std::string collect_dataset, phase, collect_out;
  collect->add_option("--dataset", collect_dataset, "JSONL questions with answer patterns")
      ->required();
  collect->add_option("--phase", phase, "quality | thresholds")
      ->required()
      ->check(CLI::IsMember({"quality", "thresholds"}));
  collect->add_option("--out", collect_out, "JSONL runs to write")->required();
  collect_flags.attach_config(collect);
  collect_flags.backend(collect);
  collect_flags.models(collect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (index->parsed())
      return cmd_index(corpus, index_out, window, out);
    if (ask->parsed())
      return cmd_ask(question, ask_flags, top, out);
    if (train->parsed())
      return cmd_train(runs, kind, model_out, train_flags, out);
    if (evaluate_cmd->parsed())
      return cmd_evaluate(dataset, eval_flags, sweep_k_list, sweep_n_flag, ns, seeds,
                          report_out, out);
    if (gen->parsed())
      return cmd_gen_bench(bopts, bench_dir, out);
    if (collect->parsed())
      return cmd_collect(collect_dataset, phase, collect_out, collect_flags, out);
  } catch (const config_error &e) {
    err << "webqa: " << e.what() << '\n';
    return exit_usage;
  } catch (const retryable_error &e) {
    err << "webqa: backend: " << e.what() << '\n';
    return exit_backend;
  } catch (const provider_error &e) {
    err << "webqa: backend: " << e.what() << '\n';
    return exit_backend;
  } catch (const std::exception &e) {
    err << "webqa: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}

} // namespace webqa
