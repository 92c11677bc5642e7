#include "webqa/rewrite.hpp"

#include <algorithm>
#include <array>

#include "webqa/error.hpp"

namespace webqa {

namespace {

constexpr std::array<std::string_view, 9> wh_words = {
    "who", "whom", "whose", "what", "which", "when", "where", "why", "how"};
constexpr std::array<std::string_view, 7> how_modifiers = {
    "many", "much", "long", "far", "old", "big", "tall"};
constexpr std::array<std::string_view, 7> auxiliaries = {
    "is", "was", "did", "does", "do", "are", "were"};

template <std::size_t N>
bool one_of(const std::array<std::string_view, N> &set, std::string_view w) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

std::size_t wh_prefix_length(const std::vector<std::string> &tokens) {
  if (tokens.empty())
    return 0;
  auto first = to_lower(tokens[0]);
  if (!one_of(wh_words, first))
    return 0;
  if (first == "how" && tokens.size() > 1 &&
      one_of(how_modifiers, to_lower(tokens[1])))
    return 2;
  return 1;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_past_participle(std::string_view w) {
  return w.size() > 3 && ends_with(to_lower(w), "ed");
}

bool is_verb_like(std::string_view w) {
  static constexpr std::array<std::string_view, 14> verbs = {
      "is", "was", "are", "were", "be", "been", "being",
      "am", "did", "does", "do", "has", "have", "had"};
  return one_of(verbs, to_lower(w)) || is_past_participle(w);
}

bool is_function_word(std::string_view w) {
  static constexpr std::array<std::string_view, 13> fw = {
      "the", "a", "an", "of", "in", "on", "at",
      "to", "by", "for", "with", "from", "into"};
  return one_of(fw, to_lower(w));
}

} // namespace

std::string_view to_string(question_type t) {
  switch (t) {
  case question_type::who: return "WHO";
  case question_type::what: return "WHAT";
  case question_type::when: return "WHEN";
  case question_type::where: return "WHERE";
  case question_type::how_many: return "HOW_MANY";
  case question_type::how_long: return "HOW_LONG";
  case question_type::other: return "OTHER";
  }
  return "OTHER";
}

std::optional<question_type> parse_question_type(std::string_view name) {
  for (auto t : {question_type::who, question_type::what, question_type::when,
                 question_type::where, question_type::how_many,
                 question_type::how_long, question_type::other})
    if (to_string(t) == name)
      return t;
  return std::nullopt;
}

std::string_view to_string(rewrite_kind k) {
  return k == rewrite_kind::phrasal ? "PHRASAL" : "CONJUNCTIVE";
}

std::string_view to_string(answer_slot s) {
  switch (s) {
  case answer_slot::left: return "LEFT";
  case answer_slot::right: return "RIGHT";
  case answer_slot::none: return "NONE";
  }
  return "NONE";
}

question_type classify_question(const std::vector<std::string> &tokens) {
  if (tokens.empty())
    return question_type::other;
  auto first = to_lower(tokens[0]);
  if (first == "who" || first == "whom" || first == "whose")
    return question_type::who;
  if (first == "when")
    return question_type::when;
  if (first == "where")
    return question_type::where;
  if (first == "what")
    return question_type::what;
  if (first == "how" && tokens.size() > 1) {
    auto second = to_lower(tokens[1]);
    if (second == "many")
      return question_type::how_many;
    if (second == "long")
      return question_type::how_long;
  }
  return question_type::other;
}

question make_question(std::string_view text) {
  question q;
  q.raw_text = std::string(text);
  q.tokens = tokenize(text);
  q.type = classify_question(q.tokens);
  return q;
}

bool is_auxiliary(std::string_view word) {
  return one_of(auxiliaries, to_lower(word));
}

std::vector<std::string> rewrite::words() const {
  std::vector<std::string> out;
  for (const auto &p : parts)
    out.insert(out.end(), p.words.begin(), p.words.end());
  return out;
}

std::string rewrite::query_string() const {
  std::string out;
  for (const auto &p : parts) {
    if (!out.empty())
      out += ' ';
    if (p.quoted)
      out += '"' + join(p.words) + '"';
    else
      out += join(p.words);
  }
  return out;
}

std::string rewrite::display() const {
  if (kind == rewrite_kind::conjunctive) {
    std::string out;
    for (const auto &p : parts) {
      if (!out.empty())
        out += " AND ";
      out += p.quoted ? '"' + join(p.words) + '"' : join(p.words);
    }
    return out;
  }
  auto q = query_string();
  if (slot == answer_slot::left)
    return "<LEFT> " + q;
  if (slot == answer_slot::right)
    return q + " <RIGHT>";
  return q;
}

std::vector<rewrite> generate_rewrites(const question &q,
                                       const rewrite_config &cfg) {
  // Sentence-initial capitalization carries no information.
  std::vector<std::string> tokens = q.tokens;
  if (!tokens.empty())
    tokens[0] = to_lower(tokens[0]);

  std::vector<rewrite> out;
  std::size_t wh = wh_prefix_length(tokens);
  if (tokens.size() >= 2 && tokens.size() > wh) {
    std::vector<std::string> rest(tokens.begin() + static_cast<long>(wh),
                                  tokens.end());
    const bool has_aux = is_auxiliary(rest[0]);
    const std::string verb = rest[0];
    const std::vector<std::string> body(rest.begin() + 1, rest.end());

    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i <= body.size(); ++i)
      positions.push_back(i);
    if (positions.size() > cfg.max_phrasal && cfg.max_phrasal > 0) {
      // Keep the verb-first and verb-last placements.
      auto last = positions.back();
      positions.resize(cfg.max_phrasal - 1);
      positions.push_back(last);
    } else if (cfg.max_phrasal == 0) {
      positions.clear();
    }

    for (auto i : positions) {
      std::vector<std::string> phrase(body.begin(),
                                      body.begin() + static_cast<long>(i));
      if (!has_aux && i == body.size() && i > 0 && is_past_participle(verb)) {
        phrase.push_back("was");
        phrase.push_back(verb);
        phrase.push_back("by");
      } else {
        phrase.push_back(verb);
        phrase.insert(phrase.end(), body.begin() + static_cast<long>(i),
                      body.end());
      }
      rewrite r;
      r.kind = rewrite_kind::phrasal;
      r.parts = {query_part{std::move(phrase), true}};
      r.slot = i == 0 ? answer_slot::left : answer_slot::right;
      r.weight = cfg.phrasal_weight;
      out.push_back(std::move(r));
    }
  }

  rewrite conj;
  conj.kind = rewrite_kind::conjunctive;
  conj.slot = answer_slot::none;
  conj.weight = cfg.conjunctive_weight;
  for (const auto &t : tokens)
    conj.parts.push_back(query_part{{t}, false});
  out.push_back(std::move(conj));
  return out;
}

conj_features extract_conj_features(const rewrite &r, const stoplist &stop) {
  conj_features f;
  f.numphrases = r.parts.size();
  for (const auto &p : r.parts) {
    f.longphrase = std::max(f.longphrase, p.words.size());
    for (const auto &w : p.words) {
      ++f.numwords;
      f.longwd = std::max(f.longwd, w.size());
      if (is_capitalized(w))
        ++f.numcap;
      if (stop.contains(w))
        ++f.numstop;
    }
  }
  f.pctstop = f.numwords ? static_cast<double>(f.numstop) /
                               static_cast<double>(f.numwords)
                         : 0.0;
  return f;
}

parse_result
heuristic_grammar_scorer::score(const std::vector<std::string> &words) const {
  parse_result res;
  if (words.empty()) {
    res.sgm = 0.0;
    return res;
  }
  std::size_t nstop = 0;
  bool any_verb = false;
  for (const auto &w : words) {
    nstop += stop_->contains(w) ? 1 : 0;
    any_verb = any_verb || is_verb_like(w);
  }
  std::size_t violations = 0;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (is_function_word(words[i]) && is_verb_like(words[i + 1]))
      ++violations;
    if (is_past_participle(words[i]) && is_auxiliary(words[i + 1]))
      ++violations;
    if (i + 2 < words.size() && is_capitalized(words[i]) &&
        is_verb_like(words[i + 1]) && is_capitalized(words[i + 2]))
      ++violations;
  }
  double pct = static_cast<double>(nstop) / static_cast<double>(words.size());
  double sgm = 1.0 - stop_penalty * pct - (any_verb ? 0.0 : fragment_penalty) -
               order_penalty * static_cast<double>(violations);
  res.sgm = std::clamp(sgm, 0.0, 1.0);
  return res;
}

phrasal_features extract_phrasal_features(const rewrite &r,
                                          const grammar_scorer &g,
                                          const stoplist &stop) {
  if (r.kind != rewrite_kind::phrasal)
    throw wrong_rewrite_kind("phrasal features requested for a conjunctive rewrite");
  auto base = extract_conj_features(r, stop);
  auto parse = g.score(r.words());
  phrasal_features f;
  f.numcap = base.numcap;
  f.numstop = base.numstop;
  f.pctstop = base.pctstop;
  f.primary_parses = parse.primary_parses;
  f.secondary_parses = parse.secondary_parses;
  f.sgm = parse.sgm;
  return f;
}

} // namespace webqa
