#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "webqa/control.hpp"

namespace webqa {

/// A question plus the regular expressions accepted as its answer.
struct qa_item {
  std::string question;
  std::vector<std::string> patterns;

  qa_item() = default;
  /// Throws config_error if there are no patterns or one fails to compile.
  qa_item(std::string question, std::vector<std::string> patterns);

  const std::vector<std::regex> &compiled() const { return compiled_; }

private:
  std::vector<std::regex> compiled_;
};

/// One JSON object per line: {"question": "...", "patterns": ["..."]}.
/// Blank lines are skipped. Throws dataset_parse_error (1-based line).
std::vector<qa_item> parse_dataset(std::istream &in);
std::vector<qa_item> load_dataset(const std::string &path);
void write_dataset(std::ostream &out, const std::vector<qa_item> &items);
void save_dataset(const std::string &path, const std::vector<qa_item> &items);

enum class verdict { correct, incorrect, abstained };
std::string_view to_string(verdict v);

/// Case-insensitive full match of the trimmed answer against any pattern.
verdict judge(const std::optional<std::string> &top_answer, const qa_item &item);

struct question_record {
  std::size_t index = 0;
  std::string question;
  std::optional<std::string> answer;
  verdict outcome = verdict::incorrect;
  std::size_t queries_issued = 0;
  std::optional<int> chosen_n; // cost-benefit only
  std::vector<std::string> errors;
};

struct report {
  std::string policy;
  std::size_t total_cost = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t abstained = 0;
  std::size_t total_questions = 0;
  /// Calls the backend actually received during the run.
  std::size_t backend_calls = 0;
  std::vector<question_record> records; // by question index

  double accuracy() const {
    return total_questions ? static_cast<double>(correct) / total_questions : 0.0;
  }
  /// correct + incorrect + abstained == total_questions and total_cost
  /// equals both the per-question sum and the backend meter.
  bool consistent() const;

  nlohmann::json to_json(bool with_records = true) const;
};

struct eval_options {
  pipeline_config pipeline;
  /// 0 means std::thread::hardware_concurrency().
  std::size_t jobs = 1;
};

/// Runs the policy over every item. A question whose text cannot be parsed
/// is recorded as incorrect with the error attached.
report evaluate(const policy_spec &policy, const std::vector<qa_item> &dataset,
                const search_provider &backend, const model_set &models,
                const eval_options &opts = {});

/// One cost-benefit report per k, c held fixed.
std::vector<report> sweep_k(const std::vector<double> &ks, double c,
                            const std::vector<qa_item> &dataset,
                            const search_provider &backend,
                            const model_set &models, const eval_options &opts = {});

struct n_sweep_row {
  int n = 0;
  double random_correct = 0.0; // mean over seeds
  double random_cost = 0.0;
  std::size_t likelihood_correct = 0;
  std::size_t likelihood_cost = 0;
};

struct n_sweep {
  std::vector<n_sweep_row> rows;
  std::vector<report> reports; // every underlying run
};

n_sweep sweep_n(const std::vector<int> &ns, const std::vector<std::uint64_t> &seeds,
                const std::vector<qa_item> &dataset, const search_provider &backend,
                const model_set &models, const eval_options &opts = {});

void print_reports(std::ostream &os, const std::vector<report> &reports);
void print_k_sweep(std::ostream &os, const std::vector<double> &ks,
                   const std::vector<report> &reports);
void print_n_sweep(std::ostream &os, const n_sweep &sweep);
void write_jsonl(std::ostream &os, const std::vector<report> &reports);

/// Training runs for the query-quality trees: each rewrite of each question
/// is submitted alone and labelled by whether its top answer is correct.
struct quality_runs {
  std::vector<training_case> conjunctive;
  std::vector<training_case> phrasal;
};

quality_runs collect_quality_runs(const std::vector<qa_item> &dataset,
                                  const search_provider &backend,
                                  const eval_options &opts = {});

/// Training runs for the threshold ensemble. Features come from the probe
/// (the first probe_size rewrites in quality order); the label for budget n
/// is whether the first n quality-ordered rewrites produce a correct answer.
std::map<int, std::vector<training_case>>
collect_threshold_runs(const std::vector<qa_item> &dataset,
                       const search_provider &backend, const model_set &models,
                       const eval_options &opts = {});

} // namespace webqa
