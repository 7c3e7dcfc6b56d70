#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "factcheck/error.hpp"
#include "factcheck/nn/train_config.hpp"
#include "factcheck/text/embeddings.hpp"

namespace cli {

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw factcheck::LoadError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "--text" style arguments: a readable file path, else the literal text.
inline std::string text_or_file(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return slurp(arg);
  return arg;
}

// Training hyper-parameters from a JSON object; absent keys keep defaults.
inline factcheck::nn::TrainConfig train_config_from_json(const nlohmann::json& j) {
  factcheck::nn::TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.keep_prob = j.value("keep_prob", c.keep_prob);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.parallel = j.value("parallel", c.parallel);
  if (j.contains("optimizer")) c.optimizer = factcheck::nn::parse_optimizer(j["optimizer"].get<std::string>());
  c.validate();
  return c;
}

// Pretrained vectors for the vocabulary when a file is given, otherwise
// seeded random rows.
inline std::shared_ptr<const factcheck::text::EmbeddingTable> vocabulary_table(
    std::shared_ptr<const factcheck::text::Vocabulary> vocab, std::size_t dim,
    const std::optional<std::string>& vectors, std::uint64_t seed, double bound) {
  using factcheck::text::EmbeddingTable;
  if (vectors) {
    std::ifstream in(*vectors);
    if (!in) throw factcheck::LoadError("cannot read '" + *vectors + "'");
    return std::make_shared<const EmbeddingTable>(factcheck::text::load_embeddings(in, vocab, dim, seed));
  }
  return std::make_shared<const EmbeddingTable>(factcheck::text::random_embeddings(vocab, dim, seed, bound));
}

}  // namespace cli
