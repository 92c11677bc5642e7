#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "webqa/text.hpp"

namespace webqa {

enum class question_type { who, what, when, where, how_many, how_long, other };

std::string_view to_string(question_type t);
/// Accepts the upper-case names used in config files ("WHO", "HOW_MANY").
std::optional<question_type> parse_question_type(std::string_view name);

struct question {
  std::string raw_text;
  std::vector<std::string> tokens;
  question_type type = question_type::other;
};

question_type classify_question(const std::vector<std::string> &tokens);

/// Tokenizes and classifies. Throws empty_question on blank input.
question make_question(std::string_view text);

enum class rewrite_kind { phrasal, conjunctive };
enum class answer_slot { left, right, none };

std::string_view to_string(rewrite_kind k);
std::string_view to_string(answer_slot s);

/// A quoted phrase (matched contiguously) or a bare term.
struct query_part {
  std::vector<std::string> words;
  bool quoted = false;

  friend bool operator==(const query_part &, const query_part &) = default;
};

struct rewrite {
  rewrite_kind kind = rewrite_kind::conjunctive;
  std::vector<query_part> parts;
  answer_slot slot = answer_slot::none;
  double weight = 1.0;

  /// All words across parts, in order.
  std::vector<std::string> words() const;
  /// Search-engine syntax: quoted phrases, space-separated AND terms.
  std::string query_string() const;
  /// Human-readable form with the answer slot marker, e.g.
  /// `<LEFT> "killed Abraham Lincoln"`.
  std::string display() const;

  friend bool operator==(const rewrite &, const rewrite &) = default;
};

struct rewrite_config {
  double phrasal_weight = 5.0;
  double conjunctive_weight = 1.0;
  std::size_t max_phrasal = 8;
};

/// Verb-placement rewriting. The wh-phrase and a leading auxiliary are
/// stripped, then the auxiliary (or, without one, the first remaining word)
/// is placed at every position among the remaining words. Each placement is
/// one quoted phrase; it gets the LEFT slot when it starts with the verb and
/// RIGHT otherwise. Without an auxiliary, a trailing "-ed" verb is rendered
/// passively ("X was killed by"). The single conjunctive back-off comes last.
std::vector<rewrite> generate_rewrites(const question &q,
                                       const rewrite_config &cfg = {});

bool is_auxiliary(std::string_view word);

struct conj_features {
  std::size_t longphrase = 0;
  std::size_t longwd = 0;
  std::size_t numcap = 0;
  std::size_t numphrases = 0;
  std::size_t numstop = 0;
  std::size_t numwords = 0;
  double pctstop = 0.0;
};

conj_features extract_conj_features(const rewrite &r,
                                    const stoplist &stop = stoplist::builtin());

struct parse_result {
  int primary_parses = 1;
  int secondary_parses = 0;
  double sgm = 1.0;
};

/// Source of the parser-derived phrasal features. Implementations must be
/// safe for concurrent const use.
class grammar_scorer {
public:
  virtual ~grammar_scorer() = default;
  virtual parse_result score(const std::vector<std::string> &words) const = 0;
};

/// Surface heuristics standing in for a statistical parser:
///
///   sgm = 1 - stop_penalty * pctstop
///           - fragment_penalty           (no verb-like word)
///           - order_penalty * violations
///
/// clamped to [0, 1]. A violation is a determiner/preposition directly
/// followed by a verb-like word, a verb-like word wedged between two
/// capitalized words, or an auxiliary directly after an "-ed" word.
/// Always reports one primary and zero secondary parses.
class heuristic_grammar_scorer final : public grammar_scorer {
public:
  double stop_penalty = 0.5;
  double fragment_penalty = 0.3;
  double order_penalty = 0.25;

  heuristic_grammar_scorer() = default;
  explicit heuristic_grammar_scorer(const stoplist &stop) : stop_(&stop) {}

  parse_result score(const std::vector<std::string> &words) const override;

private:
  const stoplist *stop_ = &stoplist::builtin();
};

struct phrasal_features {
  std::size_t numcap = 0;
  std::size_t numstop = 0;
  double pctstop = 0.0;
  int primary_parses = 0;
  int secondary_parses = 0;
  double sgm = 0.0;
};

/// Throws wrong_rewrite_kind for conjunctive rewrites.
phrasal_features
extract_phrasal_features(const rewrite &r, const grammar_scorer &g,
                         const stoplist &stop = stoplist::builtin());

} // namespace webqa
