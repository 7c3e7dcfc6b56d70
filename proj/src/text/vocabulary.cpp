#include "factcheck/text/vocabulary.hpp"

#include <algorithm>
#include <stdexcept>

namespace factcheck::text {

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

std::size_t Vocabulary::add(std::string token) {
  auto [it, inserted] = ids_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(std::move(token));
  return it->second;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus,
                             std::size_t min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence) ++counts[token];

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, n] : counts)
    if (n >= min_count && token != kPadToken && token != kUnkToken) kept.emplace_back(token, n);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary vocab;
  for (auto& [token, n] : kept) vocab.add(std::move(token));
  return vocab;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary vocab;
  for (const auto& t : tokens) vocab.add(t);
  return vocab;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.find(std::string(token)) != ids_.end();
}

std::size_t Vocabulary::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

}  // namespace factcheck::text
