#pragma once

#include <string>
#include <vector>

#include "factcheck/retrieval/article.hpp"
#include "factcheck/text/embeddings.hpp"
#include "factcheck/types.hpp"

namespace factcheck::retrieval {

inline constexpr double kSnippetThreshold = 0.75;

// Mean of the tokens' embedding rows (UNK row for unknown tokens); zero
// vector for no tokens.
Vector sentence_vector(const std::vector<std::string>& tokens, const text::EmbeddingTable& table);

// dot(u, v) / (|u| |v|), 0 when either norm is 0. Throws
// std::invalid_argument on dimension mismatch.
double cosine(const Vector& u, const Vector& v);

// Scores every article sentence against the claim, keeps those strictly
// above `threshold`, and merges runs of adjacent kept sentences into one
// snippet whose similarity is the run maximum. Document order is preserved.
std::vector<Snippet> filter_snippets(const std::vector<std::string>& claim_tokens, const Article& article,
                                     const text::EmbeddingTable& table, double threshold = kSnippetThreshold);

}  // namespace factcheck::retrieval
