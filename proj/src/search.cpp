#include "webqa/search.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "webqa/error.hpp"

namespace webqa {

using json = nlohmann::json;

namespace {

std::vector<std::string> normalize(const std::vector<std::string> &words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto &w : words) {
    auto t = to_lower(strip_word(w));
    if (!t.empty())
      out.push_back(std::move(t));
  }
  return out;
}

const std::vector<posting> no_postings;

} // namespace

inverted_index::stored_doc inverted_index::make_stored(document d) {
  stored_doc s;
  s.words = split_whitespace(d.text);
  s.terms.reserve(s.words.size());
  for (const auto &w : s.words)
    s.terms.push_back(to_lower(strip_word(w)));
  s.source = std::move(d);
  return s;
}

inverted_index inverted_index::build(std::vector<document> corpus,
                                     std::size_t window) {
  if (corpus.empty())
    throw empty_corpus("cannot index an empty corpus");
  std::sort(corpus.begin(), corpus.end(),
            [](const document &a, const document &b) { return a.id < b.id; });
  for (std::size_t i = 1; i < corpus.size(); ++i)
    if (corpus[i].id == corpus[i - 1].id)
      throw duplicate_document("duplicate document id: " + corpus[i].id);
  if (corpus.size() > std::numeric_limits<std::uint32_t>::max())
    throw error("corpus too large");

  inverted_index idx;
  idx.window_ = window;
  idx.docs_.reserve(corpus.size());
  for (auto &d : corpus)
    idx.docs_.push_back(make_stored(std::move(d)));
  for (std::uint32_t d = 0; d < idx.docs_.size(); ++d) {
    const auto &terms = idx.docs_[d].terms;
    for (std::uint32_t p = 0; p < terms.size(); ++p)
      if (!terms[p].empty())
        idx.postings_[terms[p]].push_back(posting{d, p});
  }
  return idx;
}

const std::vector<posting> &inverted_index::postings(const std::string &term) const {
  auto it = postings_.find(to_lower(term));
  return it == postings_.end() ? no_postings : it->second;
}

std::vector<posting>
inverted_index::phrase_positions(const std::vector<std::string> &phrase) const {
  auto terms = normalize(phrase);
  std::vector<posting> out;
  if (terms.empty())
    return out;
  for (const auto &p : postings(terms[0])) {
    const auto &doc_terms = docs_[p.doc].terms;
    if (p.pos + terms.size() > doc_terms.size())
      continue;
    bool match = true;
    for (std::size_t i = 1; i < terms.size() && match; ++i)
      match = doc_terms[p.pos + i] == terms[i];
    if (match)
      out.push_back(p);
  }
  return out;
}

snippet inverted_index::make_snippet(std::uint32_t doc, std::size_t begin,
                                     std::size_t length) const {
  const auto &words = docs_[doc].words;
  std::size_t lo = begin > window_ ? begin - window_ : 0;
  std::size_t hi = std::min(words.size(), begin + length + window_);
  snippet s;
  s.source_doc = docs_[doc].source.id;
  for (std::size_t i = lo; i < hi; ++i) {
    if (i > lo)
      s.text += ' ';
    s.text += words[i];
  }
  return s;
}

std::vector<snippet>
inverted_index::query_phrase(const std::vector<std::string> &phrase,
                             std::size_t limit) const {
  std::vector<snippet> out;
  auto len = normalize(phrase).size();
  for (const auto &p : phrase_positions(phrase)) {
    if (out.size() >= limit)
      break;
    out.push_back(make_snippet(p.doc, p.pos, len));
  }
  return out;
}

std::vector<snippet>
inverted_index::query_conjunctive(const std::vector<query_part> &parts,
                                  std::size_t limit) const {
  std::vector<snippet> out;
  if (parts.empty() || limit == 0)
    return out;

  // doc -> first occurrence of part 0
  std::map<std::uint32_t, std::uint32_t> first;
  for (const auto &p : phrase_positions(parts[0].words))
    first.try_emplace(p.doc, p.pos);
  for (std::size_t i = 1; i < parts.size() && !first.empty(); ++i) {
    std::set<std::uint32_t> docs;
    for (const auto &p : phrase_positions(parts[i].words))
      docs.insert(p.doc);
    for (auto it = first.begin(); it != first.end();)
      it = docs.count(it->first) ? std::next(it) : first.erase(it);
  }
  auto len = normalize(parts[0].words).size();
  for (const auto &[doc, pos] : first) {
    if (out.size() >= limit)
      break;
    out.push_back(make_snippet(doc, pos, len));
  }
  return out;
}

void inverted_index::save(const std::string &path) const {
  json j;
  j["format"] = "webqa-index";
  j["version"] = 1;
  j["window"] = window_;
  auto &docs = j["documents"] = json::array();
  for (const auto &d : docs_)
    docs.push_back({{"id", d.source.id}, {"text", d.source.text}});
  auto &post = j["postings"] = json::object();
  std::vector<std::string> terms;
  for (const auto &[t, _] : postings_)
    terms.push_back(t);
  std::sort(terms.begin(), terms.end());
  for (const auto &t : terms) {
    auto arr = json::array();
    for (const auto &p : postings_.at(t)) {
      arr.push_back(p.doc);
      arr.push_back(p.pos);
    }
    post[t] = std::move(arr);
  }
  std::ofstream out(path);
  if (!out)
    throw error("cannot write index: " + path);
  out << j.dump() << '\n';
}

inverted_index inverted_index::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw corpus_parse_error("cannot open index: " + path);
  json j;
  try {
    in >> j;
    if (j.at("format") != "webqa-index")
      throw corpus_parse_error("not an index file: " + path);
    inverted_index idx;
    idx.window_ = j.at("window").get<std::size_t>();
    for (const auto &d : j.at("documents"))
      idx.docs_.push_back(make_stored(
          document{d.at("id").get<std::string>(), d.at("text").get<std::string>()}));
    for (const auto &[term, arr] : j.at("postings").items()) {
      auto &list = idx.postings_[term];
      if (arr.size() % 2)
        throw corpus_parse_error("odd posting array for term " + term);
      for (std::size_t i = 0; i < arr.size(); i += 2) {
        posting p{arr[i].get<std::uint32_t>(), arr[i + 1].get<std::uint32_t>()};
        if (p.doc >= idx.docs_.size() ||
            p.pos >= idx.docs_[p.doc].terms.size() ||
            idx.docs_[p.doc].terms[p.pos] != term)
          throw corpus_parse_error("posting does not match document text: " + term);
        list.push_back(p);
      }
    }
    return idx;
  } catch (const json::exception &e) {
    throw corpus_parse_error("malformed index " + path + ": " + e.what());
  }
}

std::vector<snippet> offline_engine::execute(const rewrite &r,
                                             std::size_t rewrite_index,
                                             std::size_t limit) const {
  std::vector<snippet> out;
  if (r.parts.size() == 1 && r.parts[0].quoted) {
    out = index_->query_phrase(r.parts[0].words, limit);
  } else {
    std::vector<query_part> parts;
    for (const auto &p : r.parts)
      if (!drop_stopwords_ || p.quoted || p.words.size() != 1 ||
          !stop_.contains(p.words[0]))
        parts.push_back(p);
    if (parts.empty())
      parts = r.parts;
    out = index_->query_conjunctive(parts, limit);
  }
  for (auto &s : out)
    s.rewrite_index = rewrite_index;
  return out;
}

std::vector<snippet> metered_provider::execute(const rewrite &r,
                                               std::size_t rewrite_index,
                                               std::size_t limit) const {
  ++calls_;
  return inner_.execute(r, rewrite_index, limit);
}

std::vector<document> load_corpus(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw corpus_parse_error("cannot open corpus: " + path);
  std::vector<document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      auto j = json::parse(line);
      docs.push_back(document{j.at("id").get<std::string>(),
                              j.at("text").get<std::string>()});
    } catch (const json::exception &e) {
      throw corpus_parse_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return docs;
}

void save_corpus(const std::string &path, const std::vector<document> &docs) {
  std::ofstream out(path);
  if (!out)
    throw error("cannot write corpus: " + path);
  for (const auto &d : docs)
    out << json{{"id", d.id}, {"text", d.text}}.dump() << '\n';
}

} // namespace webqa
