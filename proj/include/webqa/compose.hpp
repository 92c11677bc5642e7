#pragma once

#include <cstddef>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "webqa/rewrite.hpp"
#include "webqa/search.hpp"
#include "webqa/text.hpp"

namespace webqa {

struct ngram_candidate {
  /// Reported surface form (majority casing among occurrences).
  std::vector<std::string> tokens;
  double score = 0.0;
  std::size_t support = 0;

  std::string text() const { return join(tokens); }
  /// Case-folded identity used for matching.
  std::string key() const { return to_lower(join(tokens)); }

  friend bool operator==(const ngram_candidate &, const ngram_candidate &) = default;
};

/// rewrite_index -> weight of the rewrite that produced a snippet.
using weight_map = std::map<std::size_t, double>;

struct mining_options {
  const stoplist *stop = &stoplist::builtin();
  /// Lower-cased question tokens; never part of a mined n-gram.
  std::unordered_set<std::string> question_terms;
  std::size_t max_n = 3;
};

mining_options mining_options_for(const question &q,
                                  const stoplist &stop = stoplist::builtin());

/// Every 1..max_n-gram inside a snippet scores the weight of the rewrite
/// that retrieved it, once per occurrence. N-grams never span clause
/// punctuation and never contain a stop word or a question word.
/// Output is ordered by score (desc) then key.
std::vector<ngram_candidate> mine_ngrams(const std::vector<snippet> &snippets,
                                         const weight_map &weights,
                                         const mining_options &opts = {});

/// Number of n-gram occurrences mine_ngrams would credit for one snippet.
std::size_t count_ngram_occurrences(const snippet &s,
                                    const mining_options &opts = {});

struct answer_filter {
  std::string name;
  std::set<question_type> types;
  std::string pattern;
  double factor = 1.0;

  bool applies_to(question_type t) const { return types.count(t) != 0; }
  bool matches(const std::string &candidate_text) const;

  answer_filter() = default;
  answer_filter(std::string name, std::set<question_type> types,
                std::string pattern, double factor);

private:
  std::regex re_;
};

/// Answer-type filters keyed by question type. The file form is a JSON
/// object `{ "WHO": [{"name", "pattern", "factor"}, ...], ... }`.
class filter_table {
public:
  filter_table() = default;
  explicit filter_table(std::vector<answer_filter> filters)
      : filters_(std::move(filters)) {}

  static filter_table parse(std::string_view json_text);
  static filter_table load(const std::string &path);
  /// resources/filters.json
  static const filter_table &builtin();

  const std::vector<answer_filter> &filters() const { return filters_; }

private:
  std::vector<answer_filter> filters_;
};

/// name -> number of candidates the filter fired on.
using filter_stats = std::map<std::string, std::size_t>;

/// Multiplies each candidate's score by the factor of every applicable
/// filter that matches it. Order and support are left untouched.
std::vector<ngram_candidate>
filter_ngrams(std::vector<ngram_candidate> cands, question_type qtype,
              const filter_table &table = filter_table::builtin(),
              filter_stats *stats = nullptr);

/// Greedy tiling: while some pair (A, B) has a suffix of A equal to a
/// prefix of B, merge the pair with the highest combined score (then the
/// longest overlap, then lexicographic order) into one candidate scoring
/// score(A) + score(B). Returns candidates ordered by score (desc), then key.
std::vector<ngram_candidate> tile_ngrams(std::vector<ngram_candidate> cands);

/// Sort order shared by mining and tiling output.
void rank_candidates(std::vector<ngram_candidate> &cands);

struct composition {
  std::vector<ngram_candidate> ranked;
  std::size_t mined = 0;
  filter_stats fired;
};

struct compose_options {
  mining_options mining;
  const filter_table *filters = &filter_table::builtin();
};

/// mine -> filter -> tile. The head of `ranked` is the answer.
composition compose(const std::vector<snippet> &snippets,
                    const weight_map &weights, question_type qtype,
                    const compose_options &opts = {});

std::vector<ngram_candidate> compose_answers(const std::vector<snippet> &snippets,
                                             const weight_map &weights,
                                             question_type qtype,
                                             const compose_options &opts = {});

} // namespace webqa
