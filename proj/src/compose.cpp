#include "webqa/compose.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "webqa/error.hpp"

namespace webqa {

using json = nlohmann::json;

namespace resources {
extern const std::string_view filters_json;
}

namespace {

// Runs of admissible tokens between clause punctuation and excluded words.
// Each run yields (surface, folded) token pairs.
struct token_run {
  std::vector<std::string> surface;
  std::vector<std::string> folded;
};

std::vector<token_run> admissible_runs(const std::string &text,
                                       const mining_options &opts) {
  std::vector<token_run> runs;
  token_run cur;
  auto flush = [&] {
    if (!cur.surface.empty())
      runs.push_back(std::move(cur));
    cur = {};
  };
  for (const auto &raw : split_whitespace(text)) {
    auto word = strip_word(raw);
    auto folded = to_lower(word);
    if (word.empty() || opts.stop->contains(folded) ||
        opts.question_terms.count(folded)) {
      flush();
    } else {
      cur.surface.push_back(std::move(word));
      cur.folded.push_back(std::move(folded));
    }
    if (ends_clause(raw))
      flush();
  }
  flush();
  return runs;
}

struct mined_entry {
  double score = 0.0;
  std::size_t support = 0;
  std::map<std::string, std::size_t> surfaces;
};

std::vector<std::string> split_surface(const std::string &s) {
  return split_whitespace(s);
}

} // namespace

mining_options mining_options_for(const question &q, const stoplist &stop) {
  mining_options o;
  o.stop = &stop;
  for (const auto &t : q.tokens)
    o.question_terms.insert(to_lower(t));
  return o;
}

void rank_candidates(std::vector<ngram_candidate> &cands) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i)
    keys.emplace_back(cands[i].key(), i);
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &x = cands[a];
    const auto &y = cands[b];
    if (x.score != y.score)
      return x.score > y.score;
    if (keys[a].first != keys[b].first)
      return keys[a].first < keys[b].first;
    auto xs = x.text(), ys = y.text();
    if (xs != ys)
      return xs < ys;
    return x.support > y.support;
  });
  std::vector<ngram_candidate> out;
  out.reserve(cands.size());
  for (auto i : order)
    out.push_back(std::move(cands[i]));
  cands = std::move(out);
}

std::vector<ngram_candidate> mine_ngrams(const std::vector<snippet> &snippets,
                                         const weight_map &weights,
                                         const mining_options &opts) {
  std::unordered_map<std::string, mined_entry> table;
  for (const auto &s : snippets) {
    auto w = weights.find(s.rewrite_index);
    if (w == weights.end())
      throw error("no weight for rewrite index " + std::to_string(s.rewrite_index));
    for (const auto &run : admissible_runs(s.text, opts)) {
      for (std::size_t i = 0; i < run.folded.size(); ++i) {
        std::string key, surface;
        for (std::size_t n = 1; n <= opts.max_n && i + n <= run.folded.size(); ++n) {
          if (n > 1) {
            key += ' ';
            surface += ' ';
          }
          key += run.folded[i + n - 1];
          surface += run.surface[i + n - 1];
          auto &e = table[key];
          e.score += w->second;
          ++e.support;
          ++e.surfaces[surface];
        }
      }
    }
  }
  std::vector<ngram_candidate> out;
  out.reserve(table.size());
  for (auto &[key, e] : table) {
    // Majority surface; ties go to the lexicographically smallest form.
    const std::string *best = nullptr;
    std::size_t best_count = 0;
    for (const auto &[form, count] : e.surfaces)
      if (count > best_count) {
        best = &form;
        best_count = count;
      }
    out.push_back(ngram_candidate{split_surface(*best), e.score, e.support});
  }
  rank_candidates(out);
  return out;
}

std::size_t count_ngram_occurrences(const snippet &s, const mining_options &opts) {
  std::size_t total = 0;
  for (const auto &run : admissible_runs(s.text, opts)) {
    auto len = run.folded.size();
    for (std::size_t n = 1; n <= opts.max_n && n <= len; ++n)
      total += len - n + 1;
  }
  return total;
}

answer_filter::answer_filter(std::string name, std::set<question_type> types,
                             std::string pattern, double factor)
    : name(std::move(name)), types(std::move(types)),
      pattern(std::move(pattern)), factor(factor) {
  try {
    re_ = std::regex(this->pattern, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error &e) {
    throw config_error("filter '" + this->name + "' has a bad pattern: " + e.what());
  }
  if (!(factor > 0.0))
    throw config_error("filter '" + this->name + "' needs a positive factor");
}

bool answer_filter::matches(const std::string &candidate_text) const {
  return std::regex_search(candidate_text, re_);
}

filter_table filter_table::parse(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw config_error(std::string("filter table is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw config_error("filter table must be an object keyed by question type");

  // Filters listed under several types are the same rule; keep first-seen order.
  std::vector<answer_filter> filters;
  std::map<std::string, std::size_t> by_name;
  std::size_t anon = 0;
  for (const auto &[type_name, list] : j.items()) {
    auto type = parse_question_type(type_name);
    if (!type)
      throw config_error("unknown question type in filter table: " + type_name);
    if (!list.is_array())
      throw config_error("filters for " + type_name + " must be an array");
    for (const auto &f : list) {
      try {
        std::string name = f.contains("name") ? f.at("name").get<std::string>()
                                              : "filter_" + std::to_string(anon++);
        auto pattern = f.at("pattern").get<std::string>();
        auto factor = f.at("factor").get<double>();
        auto it = by_name.find(name);
        if (it != by_name.end()) {
          auto &existing = filters[it->second];
          if (existing.pattern != pattern || existing.factor != factor)
            throw config_error("filter '" + name + "' defined inconsistently");
          auto types = existing.types;
          types.insert(*type);
          existing = answer_filter(name, types, pattern, factor);
        } else {
          by_name[name] = filters.size();
          filters.emplace_back(name, std::set<question_type>{*type}, pattern, factor);
        }
      } catch (const json::exception &e) {
        throw config_error("malformed filter under " + type_name + ": " + e.what());
      }
    }
  }
  return filter_table(std::move(filters));
}

filter_table filter_table::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open filter table: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const filter_table &filter_table::builtin() {
  static const filter_table table = parse(resources::filters_json);
  return table;
}

std::vector<ngram_candidate> filter_ngrams(std::vector<ngram_candidate> cands,
                                           question_type qtype,
                                           const filter_table &table,
                                           filter_stats *stats) {
  std::vector<const answer_filter *> active;
  for (const auto &f : table.filters())
    if (f.applies_to(qtype))
      active.push_back(&f);
  if (active.empty())
    return cands;
  for (auto &c : cands) {
    auto text = c.text();
    for (const auto *f : active)
      if (f->matches(text)) {
        c.score *= f->factor;
        if (stats)
          ++(*stats)[f->name];
      }
  }
  return cands;
}

namespace {

struct tile_node {
  ngram_candidate cand;
  std::vector<std::string> folded;
  std::string key;
  bool alive = true;
};

struct tile_pair {
  std::size_t a, b, overlap;
  double combined;
};

std::string joined(const std::vector<std::string> &w, std::size_t from, std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from)
      s += ' ';
    s += w[i];
  }
  return s;
}

} // namespace

std::vector<ngram_candidate> tile_ngrams(std::vector<ngram_candidate> cands) {
  std::vector<tile_node> nodes;
  nodes.reserve(cands.size() * 2);
  std::unordered_map<std::string, std::vector<std::size_t>> by_prefix, by_suffix;

  auto add_node = [&](ngram_candidate c) {
    tile_node n;
    for (const auto &t : c.tokens)
      n.folded.push_back(to_lower(t));
    n.key = join(n.folded);
    n.cand = std::move(c);
    nodes.push_back(std::move(n));
    auto id = nodes.size() - 1;
    const auto &f = nodes[id].folded;
    for (std::size_t len = 1; len <= f.size(); ++len) {
      by_prefix[joined(f, 0, len)].push_back(id);
      by_suffix[joined(f, f.size() - len, f.size())].push_back(id);
    }
    return id;
  };

  // Strict weak order: "x before y" in merge priority.
  auto higher = [&](const tile_pair &x, const tile_pair &y) {
    if (x.combined != y.combined)
      return x.combined > y.combined;
    if (x.overlap != y.overlap)
      return x.overlap > y.overlap;
    const auto &xa = nodes[x.a], &xb = nodes[x.b];
    const auto &ya = nodes[y.a], &yb = nodes[y.b];
    if (xa.key != ya.key)
      return xa.key < ya.key;
    if (xb.key != yb.key)
      return xb.key < yb.key;
    if (xa.cand.score != ya.cand.score)
      return xa.cand.score > ya.cand.score;
    if (xb.cand.score != yb.cand.score)
      return xb.cand.score > yb.cand.score;
    auto xat = xa.cand.text(), yat = ya.cand.text();
    if (xat != yat)
      return xat < yat;
    auto xbt = xb.cand.text(), ybt = yb.cand.text();
    if (xbt != ybt)
      return xbt < ybt;
    if (x.a != y.a)
      return x.a < y.a;
    return x.b < y.b;
  };
  auto cmp = [&](const tile_pair &x, const tile_pair &y) { return higher(y, x); };
  std::priority_queue<tile_pair, std::vector<tile_pair>, decltype(cmp)> queue(cmp);

  auto push_as_left = [&](std::size_t a) {
    const auto &f = nodes[a].folded;
    for (std::size_t len = 1; len <= f.size(); ++len) {
      auto it = by_prefix.find(joined(f, f.size() - len, f.size()));
      if (it == by_prefix.end())
        continue;
      for (auto b : it->second)
        if (b != a && nodes[b].alive)
          queue.push({a, b, len, nodes[a].cand.score + nodes[b].cand.score});
    }
  };
  auto push_as_right = [&](std::size_t b) {
    const auto &f = nodes[b].folded;
    for (std::size_t len = 1; len <= f.size(); ++len) {
      auto it = by_suffix.find(joined(f, 0, len));
      if (it == by_suffix.end())
        continue;
      for (auto a : it->second)
        if (a != b && nodes[a].alive)
          queue.push({a, b, len, nodes[a].cand.score + nodes[b].cand.score});
    }
  };

  for (auto &c : cands)
    add_node(std::move(c));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    push_as_left(i);

  while (!queue.empty()) {
    auto p = queue.top();
    queue.pop();
    if (!nodes[p.a].alive || !nodes[p.b].alive)
      continue;
    nodes[p.a].alive = false;
    nodes[p.b].alive = false;
    ngram_candidate merged;
    merged.tokens = nodes[p.a].cand.tokens;
    const auto &bt = nodes[p.b].cand.tokens;
    merged.tokens.insert(merged.tokens.end(), bt.begin() + static_cast<long>(p.overlap),
                         bt.end());
    merged.score = p.combined;
    merged.support = nodes[p.a].cand.support + nodes[p.b].cand.support;
    auto id = add_node(std::move(merged));
    push_as_left(id);
    push_as_right(id);
  }

  std::vector<ngram_candidate> out;
  for (auto &n : nodes)
    if (n.alive)
      out.push_back(std::move(n.cand));
  rank_candidates(out);
  return out;
}

composition compose(const std::vector<snippet> &snippets, const weight_map &weights,
                    question_type qtype, const compose_options &opts) {
  composition c;
  auto mined = mine_ngrams(snippets, weights, opts.mining);
  c.mined = mined.size();
  auto filtered = filter_ngrams(std::move(mined), qtype, *opts.filters, &c.fired);
  c.ranked = tile_ngrams(std::move(filtered));
  return c;
}

std::vector<ngram_candidate> compose_answers(const std::vector<snippet> &snippets,
                                             const weight_map &weights,
                                             question_type qtype,
                                             const compose_options &opts) {
  return compose(snippets, weights, qtype, opts).ranked;
}

} // namespace webqa
