#include <doctest.h>

#include <filesystem>
#include <random>

#include "webqa/error.hpp"
#include "webqa/search.hpp"
#include "test_util.hpp"

using namespace webqa;

namespace {

std::vector<document> small_corpus() {
  return {{"d2", "The Orinoco River is 1,330 miles long."},
          {"d1", "Booth killed Abraham Lincoln. Later, Booth fled."},
          {"d3", "Who knows where Lincoln was killed? Not Booth!"}};
}

// Linear scan over whitespace words: every (doc, pos) where the folded
// phrase occurs, docs in id order.
std::vector<posting> scan_phrase(std::vector<document> docs,
                                 const std::vector<std::string> &phrase) {
  std::sort(docs.begin(), docs.end(),
            [](const document &a, const document &b) { return a.id < b.id; });
  std::vector<posting> out;
  for (std::uint32_t d = 0; d < docs.size(); ++d) {
    auto words = split_whitespace(docs[d].text);
    for (std::size_t i = 0; i + phrase.size() <= words.size(); ++i) {
      bool ok = !phrase.empty();
      for (std::size_t k = 0; k < phrase.size() && ok; ++k)
        ok = to_lower(strip_word(words[i + k])) == to_lower(phrase[k]);
      if (ok)
        out.push_back({d, static_cast<std::uint32_t>(i)});
    }
  }
  return out;
}

} // namespace

TEST_CASE("index build validates the corpus") {
  CHECK_THROWS_AS(inverted_index::build({}), empty_corpus);
  CHECK_THROWS_AS(inverted_index::build({{"a", "x"}, {"a", "y"}}), duplicate_document);
}

TEST_CASE("phrase query returns windowed snippets") {
  auto idx = inverted_index::build(small_corpus(), 2);
  auto s = idx.query_phrase({"killed", "abraham"});
  REQUIRE(s.size() == 1);
  CHECK(s[0].source_doc == "d1");
  CHECK(s[0].text == "Booth killed Abraham Lincoln. Later,");
  CHECK(idx.query_phrase({"Lincoln", "Booth"}).empty());
  CHECK(idx.query_phrase({"nothing"}).empty());
}

TEST_CASE("phrase query honours the limit") {
  auto idx = inverted_index::build(small_corpus());
  CHECK(idx.query_phrase({"booth"}).size() == 3);
  CHECK(idx.query_phrase({"booth"}, 2).size() == 2);
}

TEST_CASE("conjunctive query is strict AND") {
  auto idx = inverted_index::build(small_corpus());
  std::vector<query_part> parts{{{"who"}, false}, {{"Lincoln"}, false}};
  auto s = idx.query_conjunctive(parts);
  REQUIRE(s.size() == 1);
  CHECK(s[0].source_doc == "d3");
  std::vector<query_part> lincoln{{{"Lincoln"}, false}, {{"Booth"}, false}};
  auto both = idx.query_conjunctive(lincoln);
  REQUIRE(both.size() == 2);
  CHECK(both[0].source_doc == "d1");
  CHECK(both[1].source_doc == "d3");
  std::vector<query_part> quoted{{{"abraham", "lincoln"}, true}, {{"booth"}, false}};
  CHECK(idx.query_conjunctive(quoted).size() == 1);
}

TEST_CASE("phrase positions agree with a linear scan") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vocab{"a", "b", "c", "A.", "b,", "(c)", "d"};
  for (int round = 0; round < 50; ++round) {
    std::vector<document> docs;
    std::size_t ndocs = 1 + rng() % 6;
    for (std::size_t d = 0; d < ndocs; ++d) {
      std::string text;
      std::size_t len = 1 + rng() % 20;
      for (std::size_t i = 0; i < len; ++i)
        text += vocab[rng() % vocab.size()] + " ";
      docs.push_back({"doc" + std::to_string(rng() % 1000) + "_" + std::to_string(d), text});
    }
    auto idx = inverted_index::build(docs);
    for (int q = 0; q < 10; ++q) {
      std::vector<std::string> phrase;
      std::size_t plen = 1 + rng() % 3;
      for (std::size_t i = 0; i < plen; ++i)
        phrase.push_back(std::string(1, static_cast<char>('a' + rng() % 4)));
      CHECK(idx.phrase_positions(phrase) == scan_phrase(docs, phrase));
    }
  }
}

TEST_CASE("index round-trips through a file") {
  test_util::temp_dir dir;
  auto idx = inverted_index::build(small_corpus(), 3);
  auto path = dir.file("index.json");
  idx.save(path);
  auto back = inverted_index::load(path);
  CHECK(back.size() == idx.size());
  CHECK(back.window() == 3);
  for (auto p : {std::vector<std::string>{"booth"}, {"killed", "abraham", "lincoln"}, {"river"}})
    CHECK(back.query_phrase(p) == idx.query_phrase(p));
}

TEST_CASE("corrupt index files are rejected") {
  test_util::temp_dir dir;
  auto path = dir.file("bad.json");
  test_util::write_text(path, "{\"format\": \"something else\"}");
  CHECK_THROWS_AS(inverted_index::load(path), error);
  CHECK_THROWS_AS(inverted_index::load(dir.file("missing.json")), error);
}

TEST_CASE("offline engine maps rewrites to queries") {
  auto idx = std::make_shared<const inverted_index>(inverted_index::build(small_corpus()));
  offline_engine engine(idx);
  auto rs = generate_rewrites(make_question("Who killed Abraham Lincoln?"));
  auto phrase = engine.execute(rs[0], 0, 10);
  REQUIRE(phrase.size() == 1);
  CHECK(phrase[0].rewrite_index == 0);
  // "who" is dropped from the AND terms: d1 matches without it, d3 lacks
  // "Abraham".
  auto conj = engine.execute(rs.back(), 3, 10);
  REQUIRE(conj.size() == 1);
  CHECK(conj[0].source_doc == "d1");
  CHECK(conj[0].rewrite_index == 3);
}

TEST_CASE("metered provider counts calls") {
  auto idx = std::make_shared<const inverted_index>(inverted_index::build(small_corpus()));
  offline_engine engine(idx);
  metered_provider meter(engine);
  auto rs = generate_rewrites(make_question("Who killed Abraham Lincoln?"));
  for (std::size_t i = 0; i < rs.size(); ++i)
    meter.execute(rs[i], i, 10);
  CHECK(meter.calls() == rs.size());
  meter.reset();
  CHECK(meter.calls() == 0);
}

TEST_CASE("corpus files") {
  test_util::temp_dir dir;
  auto path = dir.file("corpus.jsonl");
  save_corpus(path, small_corpus());
  auto back = load_corpus(path);
  REQUIRE(back.size() == 3);
  CHECK(back[0].id == "d2");
  test_util::write_text(path, "{\"id\": \"x\"}\n");
  CHECK_THROWS_AS(load_corpus(path), corpus_parse_error);
  CHECK_THROWS_AS(load_corpus(dir.file("none.jsonl")), error);
}
