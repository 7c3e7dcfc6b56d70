#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "factcheck/text/vocabulary.hpp"
#include "factcheck/types.hpp"

namespace factcheck::text {

inline constexpr double kOovInitBound = 0.05;
inline constexpr std::uint64_t kDefaultEmbeddingSeed = 42;

// |V| x d matrix of word vectors bound to the vocabulary that indexes it.
class EmbeddingTable {
 public:
  EmbeddingTable(std::shared_ptr<const Vocabulary> vocab, Matrix weights);

  const Vocabulary& vocabulary() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocabulary_ptr() const { return vocab_; }
  const Matrix& weights() const { return weights_; }
  std::size_t dim() const { return static_cast<std::size_t>(weights_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }

  // Row for a token; unknown tokens map to the UNK row.
  auto row(std::string_view token) const { return weights_.row(static_cast<Eigen::Index>(vocab_->id_of(token))); }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  Matrix weights_;
};

// Reads "token v1 ... vd" lines. Vocabulary tokens found in the stream get
// the stream vector; every other row is drawn uniformly from
// [-kOovInitBound, kOovInitBound]; the PAD row is zero. Blank lines are
// skipped. Throws LoadError naming the 1-based line on malformed input.
EmbeddingTable load_embeddings(std::istream& source, std::shared_ptr<const Vocabulary> vocab,
                               std::size_t dim, std::uint64_t seed = kDefaultEmbeddingSeed);

// Builds the vocabulary from the tokens of the stream itself (file order).
EmbeddingTable load_word_vectors(std::istream& source, std::size_t dim,
                                 std::uint64_t seed = kDefaultEmbeddingSeed);

// Uniform [-bound, bound] rows with a zero PAD row.
EmbeddingTable random_embeddings(std::shared_ptr<const Vocabulary> vocab, std::size_t dim,
                                 std::uint64_t seed, double bound = kOovInitBound);

// T x d; row t is the table row of tokens[t].
Matrix embed(const std::vector<std::string>& tokens, const EmbeddingTable& table);

}  // namespace factcheck::text
