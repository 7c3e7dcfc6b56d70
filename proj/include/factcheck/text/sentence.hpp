#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck::text {

struct Sentence {
  std::string text;
  std::size_t index = 0;  // position within the source document

  bool operator==(const Sentence&) const = default;
};

// Splits on '.', '!' or '?' followed by whitespace. A period that closes a
// known abbreviation ("Dr.", "U.S.", ...) does not end a sentence.
std::vector<Sentence> segment_sentences(std::string_view text);

// Lowercased word and punctuation tokens. Hyphens between word characters
// stay inside the token ("covid-19"), as do '.' and ',' between digits
// ("3.5", "1,000"). Non-ASCII bytes are treated as word characters.
std::vector<std::string> tokenize(std::string_view sentence);

// True when the token contains at least one ASCII letter, digit or
// non-ASCII byte (i.e. it is not pure punctuation).
bool is_word_token(std::string_view token);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace factcheck::text
