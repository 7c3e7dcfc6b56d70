#include "factcheck/text/sentence.hpp"

#include <algorithm>
#include <array>

namespace factcheck::text {
namespace {

constexpr std::array<std::string_view, 8> kAbbreviations = {
    "dr.", "mr.", "mrs.", "ms.", "u.s.", "e.g.", "i.e.", "etc."};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_word_char(char c) {
  return is_ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Word ending at `end` (inclusive), lowercased, with leading punctuation
// such as '(' or a quote stripped.
bool ends_with_abbreviation(std::string_view text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  while (begin < end && !is_ascii_alnum(text[begin])) ++begin;
  std::string word;
  for (std::size_t i = begin; i <= end; ++i) word.push_back(ascii_lower(text[i]));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

}  // namespace

std::vector<Sentence> segment_sentences(std::string_view text) {
  std::vector<Sentence> out;
  auto emit = [&](std::string_view piece) {
    piece = trim(piece);
    if (!piece.empty()) out.push_back({std::string(piece), out.size()});
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (!is_space(text[i + 1])) continue;
    if (c == '.' && ends_with_abbreviation(text, i)) continue;
    emit(text.substr(start, i + 1 - start));
    start = i + 1;
  }
  if (start < text.size()) emit(text.substr(start));
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (is_space(c)) {
      flush();
    } else if (is_word_char(c)) {
      current.push_back(ascii_lower(c));
    } else {
      const bool has_next = i + 1 < s.size();
      const bool joins_words = c == '-' && !current.empty() && has_next && is_word_char(s[i + 1]);
      const bool joins_digits = (c == '.' || c == ',') && !current.empty() &&
                                is_digit(current.back()) && has_next && is_digit(s[i + 1]);
      if (joins_words || joins_digits) {
        current.push_back(c);
      } else {
        flush();
        tokens.emplace_back(1, c);
      }
    }
  }
  flush();
  return tokens;
}

bool is_word_token(std::string_view token) {
  return std::any_of(token.begin(), token.end(), is_word_char);
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace factcheck::text
