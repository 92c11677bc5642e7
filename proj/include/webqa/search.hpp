#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "webqa/rewrite.hpp"
#include "webqa/text.hpp"

namespace webqa {

struct document {
  std::string id;
  std::string text;
};

struct snippet {
  std::string text;
  std::string source_doc;
  std::size_t rewrite_index = 0;

  friend bool operator==(const snippet &, const snippet &) = default;
};

/// Anything that can run a rewrite and hand back page summaries.
/// Implementations must tolerate concurrent execute() calls.
class search_provider {
public:
  virtual ~search_provider() = default;
  virtual std::vector<snippet> execute(const rewrite &r,
                                       std::size_t rewrite_index,
                                       std::size_t limit) const = 0;
};

inline constexpr std::size_t default_window = 10;
inline constexpr std::size_t default_limit = 100;

struct posting {
  std::uint32_t doc = 0;
  std::uint32_t pos = 0;
  friend bool operator==(const posting &, const posting &) = default;
};

/// Immutable positional inverted index. Terms are matched case-insensitively;
/// snippet text keeps the source words (case and punctuation) verbatim.
/// Documents are held in id order, so postings are ordered by (doc id, pos).
class inverted_index {
public:
  /// Throws empty_corpus / duplicate_document.
  static inverted_index build(std::vector<document> corpus,
                              std::size_t window = default_window);

  std::vector<snippet> query_phrase(const std::vector<std::string> &phrase,
                                    std::size_t limit = default_limit) const;
  /// Documents containing every part (quoted parts contiguously). One
  /// snippet per document centred on the first part's first occurrence.
  std::vector<snippet>
  query_conjunctive(const std::vector<query_part> &parts,
                    std::size_t limit = default_limit) const;

  /// Start positions of every contiguous occurrence, ordered by (doc, pos).
  std::vector<posting>
  phrase_positions(const std::vector<std::string> &phrase) const;

  const std::vector<posting> &postings(const std::string &term) const;
  std::size_t size() const { return docs_.size(); }
  const document &doc(std::size_t i) const { return docs_[i].source; }
  std::size_t window() const { return window_; }

  void save(const std::string &path) const;
  static inverted_index load(const std::string &path);

private:
  struct stored_doc {
    document source;
    std::vector<std::string> words; // whitespace-split, verbatim
    std::vector<std::string> terms; // stripped + lower-cased, may be empty
  };

  static stored_doc make_stored(document d);
  snippet make_snippet(std::uint32_t doc, std::size_t begin,
                       std::size_t length) const;

  std::vector<stored_doc> docs_;
  std::unordered_map<std::string, std::vector<posting>> postings_;
  std::size_t window_ = default_window;
};

/// Offline search engine over an inverted index. Single quoted-phrase
/// rewrites become phrase queries; everything else is a conjunctive query.
/// Like a web engine it ignores stop words among bare AND terms (unless
/// nothing else is left).
class offline_engine final : public search_provider {
public:
  offline_engine(std::shared_ptr<const inverted_index> index,
                 const stoplist &stop = stoplist::builtin(),
                 bool drop_stopwords = true)
      : index_(std::move(index)), stop_(stop), drop_stopwords_(drop_stopwords) {}

  std::vector<snippet> execute(const rewrite &r, std::size_t rewrite_index,
                               std::size_t limit) const override;

  const inverted_index &index() const { return *index_; }

private:
  std::shared_ptr<const inverted_index> index_;
  stoplist stop_;
  bool drop_stopwords_;
};

/// Counts execute() calls on the wrapped provider.
class metered_provider final : public search_provider {
public:
  explicit metered_provider(const search_provider &inner) : inner_(inner) {}

  std::vector<snippet> execute(const rewrite &r, std::size_t rewrite_index,
                               std::size_t limit) const override;

  std::size_t calls() const { return calls_.load(); }
  void reset() { calls_ = 0; }

private:
  const search_provider &inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

/// One JSON object per line with `id` and `text`.
std::vector<document> load_corpus(const std::string &path);
void save_corpus(const std::string &path, const std::vector<document> &docs);

} // namespace webqa
