#include "factcheck/text/embeddings.hpp"

#include <charconv>
#include <random>
#include <sstream>
#include <string_view>

#include "factcheck/error.hpp"

namespace factcheck::text {
namespace {

struct ParsedLine {
  std::string token;
  std::vector<double> values;
};

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

std::vector<ParsedLine> parse_stream(std::istream& source, std::size_t dim) {
  std::vector<ParsedLine> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      std::ostringstream msg;
      msg << "embeddings line " << line_no << ": expected " << dim << " values, found "
          << fields.size() - 1;
      throw LoadError(msg.str());
    }
    ParsedLine parsed{std::string(fields[0]), std::vector<double>(dim)};
    for (std::size_t k = 0; k < dim; ++k) {
      auto f = fields[k + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), parsed.values[k]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        std::ostringstream msg;
        msg << "embeddings line " << line_no << ": non-numeric value '" << f << "'";
        throw LoadError(msg.str());
      }
    }
    lines.push_back(std::move(parsed));
  }
  return lines;
}

Matrix uniform_rows(std::size_t rows, std::size_t dim, std::uint64_t seed, double bound) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, dim);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  m.row(Vocabulary::kPad).setZero();
  return m;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::shared_ptr<const Vocabulary> vocab, Matrix weights)
    : vocab_(std::move(vocab)), weights_(std::move(weights)) {
  if (!vocab_) throw std::invalid_argument("embedding table needs a vocabulary");
  if (static_cast<std::size_t>(weights_.rows()) != vocab_->size())
    throw std::invalid_argument("embedding rows must equal vocabulary size");
}

EmbeddingTable load_embeddings(std::istream& source, std::shared_ptr<const Vocabulary> vocab,
                               std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  auto lines = parse_stream(source, dim);
  Matrix weights = uniform_rows(vocab->size(), dim, seed, kOovInitBound);
  std::vector<bool> seen(vocab->size(), false);
  for (const auto& l : lines) {
    if (!vocab->contains(l.token)) continue;
    const auto id = vocab->id_of(l.token);
    if (id == Vocabulary::kPad || seen[id]) continue;
    seen[id] = true;
    for (std::size_t k = 0; k < dim; ++k) weights(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(k)) = l.values[k];
  }
  return EmbeddingTable(std::move(vocab), std::move(weights));
}

EmbeddingTable load_word_vectors(std::istream& source, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  auto lines = parse_stream(source, dim);
  std::vector<std::string> tokens;
  tokens.reserve(lines.size());
  for (const auto& l : lines) tokens.push_back(l.token);
  auto vocab = std::make_shared<const Vocabulary>(Vocabulary::from_tokens(tokens));
  Matrix weights = uniform_rows(vocab->size(), dim, seed, kOovInitBound);
  std::vector<bool> seen(vocab->size(), false);
  for (const auto& l : lines) {
    const auto id = vocab->id_of(l.token);
    if (id == Vocabulary::kPad || seen[id]) continue;
    seen[id] = true;
    for (std::size_t k = 0; k < dim; ++k) weights(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(k)) = l.values[k];
  }
  return EmbeddingTable(std::move(vocab), std::move(weights));
}

EmbeddingTable random_embeddings(std::shared_ptr<const Vocabulary> vocab, std::size_t dim,
                                 std::uint64_t seed, double bound) {
  Matrix weights = uniform_rows(vocab->size(), dim, seed, bound);
  return EmbeddingTable(std::move(vocab), std::move(weights));
}

Matrix embed(const std::vector<std::string>& tokens, const EmbeddingTable& table) {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(table.dim()));
  for (std::size_t t = 0; t < tokens.size(); ++t) out.row(static_cast<Eigen::Index>(t)) = table.row(tokens[t]);
  return out;
}

}  // namespace factcheck::text
