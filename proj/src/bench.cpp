#include "webqa/bench.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>
#include <string>
#include <string_view>

#include "webqa/error.hpp"

namespace webqa {

namespace {

constexpr std::array<std::string_view, 18> onsets = {
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
    "s", "t", "v", "z", "br", "dr", "kr", "st"};
constexpr std::array<std::string_view, 7> vowels = {"a", "e", "i", "o", "u", "ai", "ou"};
constexpr std::array<std::string_view, 6> codas = {"", "n", "r", "l", "s", "th"};

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z')
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string escape_regex(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (std::string_view("\\^$.|?*+()[]{}").find(ch) != std::string_view::npos)
      out += '\\';
    out += ch;
  }
  return out;
}

class generator {
public:
  explicit generator(std::uint64_t seed) : rng_(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class C> const auto &pick(const C &c) { return c[uniform(0, c.size() - 1)]; }
  std::mt19937_64 &rng() { return rng_; }

  /// A fresh capitalized two- or three-syllable word.
  std::string name() {
    for (;;) {
      std::string w;
      std::size_t syllables = uniform(2, 3);
      for (std::size_t i = 0; i < syllables; ++i) {
        w += pick(onsets);
        w += pick(vowels);
        if (i + 1 == syllables)
          w += pick(codas);
      }
      w = capitalize(w);
      if (w.size() >= 4 && !stoplist::builtin().contains(w) && used_.insert(w).second)
        return w;
    }
  }

  std::string year() { return std::to_string(uniform(1200, 1990)); }

private:
  std::mt19937_64 rng_;
  std::set<std::string> used_;
};

struct fact {
  std::string question;
  std::vector<std::string> patterns;
  std::vector<std::string> support;    // paraphrase templates, one per doc
  std::vector<std::string> distractor; // wrong-answer templates
  std::vector<std::string> filler;     // on-topic, answer-free
};

std::string fill(std::string t, const std::vector<std::pair<std::string, std::string>> &vars) {
  for (const auto &[key, value] : vars) {
    std::string tag = "{" + key + "}";
    for (auto pos = t.find(tag); pos != std::string::npos; pos = t.find(tag, pos + value.size()))
      t.replace(pos, tag.size(), value);
  }
  return capitalize(t);
}

struct who_verb {
  std::string_view verb;
  std::vector<std::string_view> kinds; // empty: the object is a person
};

fact make_who(generator &g) {
  static const std::vector<who_verb> verbs = {
      {"killed", {}},
      {"founded", {"Academy", "Guild", "Company"}},
      {"invented", {"Engine", "Loom", "Press"}},
      {"discovered", {"Comet", "Island", "Cave"}},
      {"painted", {"Portrait", "Mural"}},
      {"designed", {"Bridge", "Tower", "Canal"}}};
  const auto &v = g.pick(verbs);
  std::string object = v.kinds.empty() ? g.name() + " " + g.name()
                                       : "the " + g.name() + " " + std::string(g.pick(v.kinds));
  std::string first = g.name(), last = g.name();
  std::string answer = first + " " + last;
  std::string wrong = g.name() + " " + g.name();
  std::vector<std::pair<std::string, std::string>> vars = {
      {"V", answer},         {"E", object}, {"W", wrong}, {"verb", std::string(v.verb)},
      {"Y", g.year()},       {"Y2", g.year()}};
  fact f;
  f.question = "Who " + std::string(v.verb) + " " + object + "?";
  f.patterns = {"(" + escape_regex(first) + " )?" + escape_regex(last)};
  for (auto t : {"{V} {verb} {E} in {Y}.", "{E} was {verb} by {V} in {Y}.",
                 "it was {V} who {verb} {E}.", "records show that {E} was {verb} by {V}.",
                 "in {Y}, {V} {verb} {E}."})
    f.support.push_back(fill(t, vars));
  for (auto t : {"{W} wrote a book about who {verb} {E}.",
                 "{W} claimed that {E} was never {verb} at all."})
    f.distractor.push_back(fill(t, vars));
  f.filler = {fill("{E} is mentioned in many old travel guides.", vars),
              fill("a small museum now tells the story of {E}.", vars)};
  return f;
}

fact make_where(generator &g) {
  static const std::vector<std::string_view> kinds = {"Tower", "Temple", "Palace", "Falls",
                                                      "Fortress"};
  std::string object = g.name() + " " + std::string(g.pick(kinds));
  std::string answer = g.name(), wrong = g.name();
  std::vector<std::pair<std::string, std::string>> vars = {
      {"V", answer}, {"E", object}, {"W", wrong}};
  fact f;
  f.question = "Where is the " + object + "?";
  f.patterns = {escape_regex(answer)};
  for (auto t : {"the {E} is located in {V}.", "the {E} is in {V}, near the old market.",
                 "{V} is home to the {E}.", "tourists visit the {E} in {V} every summer.",
                 "the {E} is a famous landmark of {V}."})
    f.support.push_back(fill(t, vars));
  for (auto t : {"the {E} is not in {W}, despite the rumors.",
                 "a replica of the {E} stands in {W}."})
    f.distractor.push_back(fill(t, vars));
  f.filler = {fill("the {E} was damaged by a storm and later repaired.", vars),
              fill("guides say the {E} is best seen at dawn.", vars)};
  return f;
}

fact make_what(generator &g) {
  std::string country = g.name(), answer = g.name(), wrong = g.name();
  std::vector<std::pair<std::string, std::string>> vars = {
      {"V", answer}, {"E", country}, {"W", wrong}, {"Y", g.year()}};
  fact f;
  f.question = "What is the capital of " + country + "?";
  f.patterns = {escape_regex(answer)};
  for (auto t : {"the capital of {E} is {V}.", "{V} is the capital of {E}.",
                 "{V}, the capital of {E}, sits on a wide river.",
                 "in {Y}, {E} moved its capital to {V}."})
    f.support.push_back(fill(t, vars));
  for (auto t : {"{W} is the largest city of {E}, but not its capital.",
                 "many visitors think the capital of {E} is {W}."})
    f.distractor.push_back(fill(t, vars));
  f.filler = {fill("{E} is known for its mountains and lakes.", vars),
              fill("the people of {E} elect a new council every four years.", vars)};
  return f;
}

fact make_when(generator &g) {
  static const std::vector<std::string_view> kinds = {"Abbey", "University", "Harbor",
                                                      "Library", "Cathedral"};
  std::string object = g.name() + " " + std::string(g.pick(kinds));
  std::string answer = g.year(), wrong = g.year();
  while (wrong == answer)
    wrong = g.year();
  std::vector<std::pair<std::string, std::string>> vars = {
      {"V", answer}, {"E", object}, {"W", wrong}};
  fact f;
  f.question = "When was the " + object + " founded?";
  f.patterns = {escape_regex(answer)};
  for (auto t : {"the {E} was founded in {V}.", "in {V}, the {E} was founded by monks.",
                 "the {E}, founded in {V}, is still in use.",
                 "the {E} was founded in {V} by a group of merchants."})
    f.support.push_back(fill(t, vars));
  for (auto t : {"some claim the {E} was founded in {W}.",
                 "the {E} was restored in {W}, long after it was founded."})
    f.distractor.push_back(fill(t, vars));
  f.filler = {fill("the {E} holds a large collection of maps.", vars),
              fill("students often gather outside the {E}.", vars)};
  return f;
}

fact make_how_many(generator &g) {
  std::string town = g.name();
  std::string answer = std::to_string(g.uniform(1200, 98000));
  std::string wrong = std::to_string(g.uniform(1200, 98000));
  std::vector<std::pair<std::string, std::string>> vars = {
      {"V", answer}, {"E", town}, {"W", wrong}};
  fact f;
  f.question = "How many people live in " + town + "?";
  f.patterns = {escape_regex(answer)};
  for (auto t : {"about {V} people live in {E}.", "{V} people live in {E} today.",
                 "census takers found that {V} people live in {E}.",
                 "in {E}, {V} people live along the river."})
    f.support.push_back(fill(t, vars));
  for (auto t : {"over {W} people visit {E} each year, but few live there.",
                 "{W} people live in the valley near {E}."})
    f.distractor.push_back(fill(t, vars));
  f.filler = {fill("{E} has a busy market square.", vars),
              fill("the road to {E} crosses two bridges.", vars)};
  return f;
}

fact make_how_long(generator &g) {
  std::string river = g.name() + " River";
  std::string answer = std::to_string(g.uniform(40, 2900));
  std::string wrong = std::to_string(g.uniform(40, 2900));
  std::vector<std::pair<std::string, std::string>> vars = {
      {"V", answer}, {"E", river}, {"W", wrong}};
  fact f;
  f.question = "How long is the " + river + "?";
  f.patterns = {escape_regex(answer) + "( miles)?"};
  for (auto t : {"the {E} is {V} miles long.", "at {V} miles, the {E} is the longest in the region.",
                 "the {E} flows for {V} miles.", "the {E} is {V} miles long from source to sea."})
    f.support.push_back(fill(t, vars));
  for (auto t : {"the {E} is {W} miles from the capital.",
                 "a canal {W} miles long joins the {E}."})
    f.distractor.push_back(fill(t, vars));
  f.filler = {fill("the {E} floods every spring.", vars),
              fill("fishermen work along the banks of the {E}.", vars)};
  return f;
}

} // namespace

benchmark generate_benchmark(const bench_options &opts) {
  if (opts.facts == 0)
    throw config_error("benchmark needs at least one fact");
  if (opts.max_redundancy == 0)
    throw config_error("max_redundancy must be positive");
  generator g(opts.seed);
  using maker = fact (*)(generator &);
  const std::array<maker, 6> makers = {make_who,  make_where,    make_what,
                                       make_when, make_how_many, make_how_long};

  std::vector<std::string> texts;
  std::vector<qa_item> items;
  for (std::size_t i = 0; i < opts.facts; ++i) {
    fact f = makers[i % makers.size()](g);
    bool answerable = !g.chance(opts.unanswerable);
    std::size_t support = answerable ? g.uniform(1, opts.max_redundancy) : 0;
    std::size_t distract = g.uniform(answerable ? 0 : 1, std::max<std::size_t>(opts.max_distractors, 1));
    if (opts.max_distractors == 0 && answerable)
      distract = 0;
    std::shuffle(f.support.begin(), f.support.end(), g.rng());
    for (std::size_t s = 0; s < support; ++s)
      texts.push_back(f.support[s % f.support.size()]);
    for (std::size_t d = 0; d < distract; ++d)
      texts.push_back(g.pick(f.distractor));
    if (g.chance(0.5))
      texts.push_back(g.pick(f.filler));
    items.emplace_back(f.question, f.patterns);
  }

  std::shuffle(texts.begin(), texts.end(), g.rng());
  benchmark b;
  b.corpus.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::string id = std::to_string(i);
    b.corpus.push_back({"b" + std::string(6 - std::min<std::size_t>(id.size(), 6), '0') + id,
                        std::move(texts[i])});
  }

  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::shuffle(order.begin(), order.end(), g.rng());
  auto n_train = static_cast<std::size_t>(opts.train_fraction * static_cast<double>(items.size()));
  std::vector<bool> in_train(items.size(), false);
  for (std::size_t i = 0; i < n_train; ++i)
    in_train[order[i]] = true;
  for (std::size_t i = 0; i < items.size(); ++i)
    (in_train[i] ? b.train : b.test).push_back(items[i]);
  return b;
}

} // namespace webqa
