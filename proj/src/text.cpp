#include "webqa/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "webqa/error.hpp"

namespace webqa {

namespace resources {
extern const std::string_view stopwords_txt;
}

namespace {

bool is_leading_punct(char c) {
  switch (c) {
  case '"': case '\'': case '(': case '[': case '{': case '<': case '`':
  case ',': case '.': case ';': case ':': case '!': case '?': case '-':
  case '*':
    return true;
  default:
    return false;
  }
}

bool is_trailing_punct(char c) {
  switch (c) {
  case '"': case '\'': case ')': case ']': case '}': case '>': case '`':
  case ',': case '.': case ';': case ':': case '!': case '?': case '-':
  case '*':
    return true;
  default:
    return false;
  }
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

} // namespace

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i]))
      ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j]))
      ++j;
    if (j > i)
      out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string strip_word(std::string_view word) {
  std::size_t b = 0, e = word.size();
  while (b < e && is_leading_punct(word[b]))
    ++b;
  while (e > b && is_trailing_punct(word[e - 1]))
    --e;
  return std::string(word.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (const auto &w : split_whitespace(text)) {
    auto t = strip_word(w);
    if (!t.empty())
      tokens.push_back(std::move(t));
  }
  if (tokens.empty())
    throw empty_question("question has no word tokens");
  return tokens;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join(const std::vector<std::string> &words, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i)
      out += sep;
    out += words[i];
  }
  return out;
}

bool ends_clause(std::string_view raw_word) {
  std::size_t e = raw_word.size();
  while (e > 0 && (raw_word[e - 1] == '"' || raw_word[e - 1] == '\'' ||
                   raw_word[e - 1] == ')' || raw_word[e - 1] == ']'))
    --e;
  if (e == 0)
    return false;
  switch (raw_word[e - 1]) {
  case '.': case ',': case ';': case ':': case '!': case '?':
    return true;
  default:
    return false;
  }
}

bool is_capitalized(std::string_view word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word[0]));
}

stoplist::stoplist(const std::vector<std::string> &words) {
  for (const auto &w : words)
    words_.insert(to_lower(w));
}

stoplist stoplist::parse(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto parts = split_whitespace(line);
    if (parts.empty() || parts[0][0] == '#')
      continue;
    words.push_back(parts[0]);
  }
  return stoplist(words);
}

stoplist stoplist::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open stop-word list: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const stoplist &stoplist::builtin() {
  static const stoplist list = parse(resources::stopwords_txt);
  return list;
}

bool stoplist::contains(std::string_view word) const {
  return words_.count(to_lower(word)) != 0;
}

} // namespace webqa
