#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace webqa {

/// Whitespace split with leading/trailing punctuation stripped from each
/// word. Case, digits and word-internal punctuation ("3.5%", "Ford's") are
/// kept. Throws empty_question when nothing survives.
std::vector<std::string> tokenize(std::string_view text);

/// Strip edge punctuation from a single whitespace-delimited word. May
/// return an empty string.
std::string strip_word(std::string_view word);

std::vector<std::string> split_whitespace(std::string_view text);

std::string to_lower(std::string_view s);
std::string join(const std::vector<std::string> &words, std::string_view sep = " ");

/// True when the word carries sentence or clause punctuation at its end
/// (".", ",", ";", ":", "!", "?"), ignoring closing quotes/brackets.
bool ends_clause(std::string_view raw_word);

bool is_capitalized(std::string_view word);

/// Case-insensitive stop-word set.
class stoplist {
public:
  stoplist() = default;
  explicit stoplist(const std::vector<std::string> &words);

  /// One word per line; blank lines and lines starting with '#' ignored.
  static stoplist parse(std::string_view text);
  static stoplist load(const std::string &path);
  /// The list shipped in resources/stopwords.txt.
  static const stoplist &builtin();

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

private:
  std::unordered_set<std::string> words_;
};

} // namespace webqa
