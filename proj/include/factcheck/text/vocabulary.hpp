#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace factcheck::text {

class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  // Tokens with frequency >= min_count; specials first, then descending
  // frequency, ties broken lexicographically.
  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus,
                          std::size_t min_count);

  // Specials followed by `tokens` in the given order; duplicates and
  // special names are skipped.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  // UNK id for unknown tokens.
  std::size_t id_of(std::string_view token) const;
  const std::string& token_of(std::size_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::size_t add(std::string token);

  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> tokens_;
};

}  // namespace factcheck::text
