#pragma once

// Reference snippet filter: scores each sentence on its own with plain
// loops, thresholds strictly, then merges adjacent survivors greedily.

#include <cmath>
#include <string>
#include <vector>

#include "factcheck/retrieval/article.hpp"
#include "factcheck/text/embeddings.hpp"
#include "factcheck/text/sentence.hpp"

namespace testsupport {

inline std::vector<double> mean_embedding(const std::vector<std::string>& tokens,
                                          const factcheck::text::EmbeddingTable& table) {
  std::vector<double> v(table.dim(), 0.0);
  if (tokens.empty()) return v;
  for (const auto& t : tokens) {
    const auto row = table.row(t);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += row[static_cast<Eigen::Index>(k)];
  }
  for (double& x : v) x /= static_cast<double>(tokens.size());
  return v;
}

inline double plain_cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    nu += u[k] * u[k];
    nv += v[k] * v[k];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return c > 1.0 ? 1.0 : c < -1.0 ? -1.0 : c;
}

inline std::vector<factcheck::retrieval::Snippet> brute_force_snippets(
    const std::vector<std::string>& claim_tokens, const factcheck::retrieval::Article& article,
    const factcheck::text::EmbeddingTable& table, double threshold) {
  const auto claim = mean_embedding(claim_tokens, table);
  std::vector<double> sims;
  for (const auto& s : article.sentences)
    sims.push_back(plain_cosine(claim, mean_embedding(factcheck::text::tokenize(s.text), table)));

  std::vector<factcheck::retrieval::Snippet> out;
  std::size_t i = 0;
  while (i < sims.size()) {
    if (!(sims[i] > threshold)) {
      ++i;
      continue;
    }
    factcheck::retrieval::Snippet s{article.url, i, i, article.sentences[i].text, sims[i]};
    while (i + 1 < sims.size() && sims[i + 1] > threshold) {
      ++i;
      s.end = i;
      s.text += " " + article.sentences[i].text;
      if (sims[i] > s.similarity) s.similarity = sims[i];
    }
    out.push_back(s);
    ++i;
  }
  return out;
}

}  // namespace testsupport
