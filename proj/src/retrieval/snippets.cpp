#include "factcheck/retrieval/snippets.hpp"

#include <stdexcept>

#include "factcheck/kernels.hpp"
#include "factcheck/text/sentence.hpp"

namespace factcheck::retrieval {
namespace {

std::vector<std::size_t> token_ids(const std::vector<std::string>& tokens, const text::EmbeddingTable& table) {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(table.vocabulary().id_of(t));
  return ids;
}

}  // namespace

Vector sentence_vector(const std::vector<std::string>& tokens, const text::EmbeddingTable& table) {
  Matrix mean;
  kernels::serial::mean_rows(table.weights(), {token_ids(tokens, table)}, mean);
  return mean.row(0).transpose();
}

double cosine(const Vector& u, const Vector& v) {
  return kernels::cosine(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                         std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

std::vector<Snippet> filter_snippets(const std::vector<std::string>& claim_tokens, const Article& article,
                                     const text::EmbeddingTable& table, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("snippet threshold must be in [0, 1]");
  const Vector claim = sentence_vector(claim_tokens, table);

  std::vector<std::vector<std::size_t>> ids;
  ids.reserve(article.sentences.size());
  for (const auto& s : article.sentences) ids.push_back(token_ids(text::tokenize(s.text), table));
  Matrix vectors;
  kernels::mean_rows(table.weights(), ids, vectors);
  std::vector<double> sims;
  kernels::cosine_rows(claim, vectors, sims);

  std::vector<Snippet> out;
  bool open = false;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    if (!(sims[i] > threshold)) {
      open = false;
      continue;
    }
    const auto& sentence = article.sentences[i];
    if (open) {
      auto& s = out.back();
      s.end = i;
      s.text += ' ';
      s.text += sentence.text;
      s.similarity = std::max(s.similarity, sims[i]);
    } else {
      out.push_back({article.url, i, i, sentence.text, sims[i]});
      open = true;
    }
  }
  return out;
}

}  // namespace factcheck::retrieval
