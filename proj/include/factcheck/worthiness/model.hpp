#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/metrics.hpp"
#include "factcheck/nn/lstm.hpp"
#include "factcheck/nn/train_config.hpp"
#include "factcheck/retrieval/article.hpp"
#include "factcheck/text/embeddings.hpp"
#include "factcheck/text/sentence.hpp"

namespace factcheck::worthiness {

inline constexpr std::size_t kDefaultHidden = 64;

// Class order of the output layer.
enum class Label : int { kClaim = 0, kNonClaim = 1 };

Label parse_label(std::string_view s);
std::string_view to_string(Label label);

struct LabeledSentence {
  std::string text;
  Label label = Label::kClaim;
};

struct WorthinessParams {
  nn::LstmParams lstm;  // input d -> hidden
  Matrix out_w;         // 2 x hidden
  Vector out_b;         // 2

  static WorthinessParams zeros(std::size_t input, std::size_t hidden);
  static WorthinessParams random(std::size_t input, std::size_t hidden, nn::Rng& rng);
  nn::TensorList tensors();
};

struct ScoredSentence {
  text::Sentence sentence;
  double score = 0.0;  // P(claim)
};

// Check-worthiness classifier: frozen word embeddings -> LSTM -> mean of
// states -> dense -> softmax over (claim, non-claim).
class WorthinessModel {
 public:
  WorthinessModel(std::shared_ptr<const text::EmbeddingTable> embeddings, WorthinessParams params);

  static WorthinessModel create(std::shared_ptr<const text::EmbeddingTable> embeddings, std::size_t hidden,
                                std::uint64_t seed);

  // (P(claim), P(non-claim)) from the word tokens of `tokens`; punctuation
  // is ignored. No word tokens gives (0, 1).
  Vector probabilities(const std::vector<std::string>& tokens) const;
  ScoredSentence score_sentence(const text::Sentence& sentence) const;

  // Cross-entropy of one sentence; adds its gradient into `grad`. Returns 0
  // and leaves `grad` untouched for sentences without tokens.
  double loss_and_gradient(const std::vector<std::string>& tokens, Label label, WorthinessParams& grad) const;

  const WorthinessParams& params() const { return params_; }
  WorthinessParams& mutable_params() { return params_; }
  const text::EmbeddingTable& embeddings() const { return *embeddings_; }
  std::shared_ptr<const text::EmbeddingTable> embeddings_ptr() const { return embeddings_; }
  std::size_t hidden() const { return params_.lstm.hidden_dim(); }

  void save(const std::filesystem::path& path) const;
  static WorthinessModel load(const std::filesystem::path& path);

 private:
  std::shared_ptr<const text::EmbeddingTable> embeddings_;
  WorthinessParams params_;
};

// Keeps scores >= threshold, sorts by descending score (ties by sentence
// index), truncates to top_k.
std::vector<ScoredSentence> rank_scored(std::vector<ScoredSentence> scored, double threshold, std::size_t top_k);

std::vector<ScoredSentence> rank_claims(const WorthinessModel& model, std::span<const text::Sentence> sentences,
                                        double threshold, std::size_t top_k);
std::vector<ScoredSentence> rank_claims(const WorthinessModel& model, const retrieval::Article& article,
                                        double threshold, std::size_t top_k);

struct WorthinessTrainResult {
  WorthinessModel model;  // parameters of the best validation epoch
  std::vector<nn::EpochStats> history;
  std::size_t best_epoch = 0;
};

// Mini-batch training on softmax cross-entropy. Validation defaults to the
// training set. Throws TrainingError when a label is missing.
WorthinessTrainResult train_worthiness(const std::vector<LabeledSentence>& data, const nn::TrainConfig& config,
                                       std::shared_ptr<const text::EmbeddingTable> embeddings,
                                       std::size_t hidden = kDefaultHidden,
                                       const std::vector<LabeledSentence>* validation = nullptr);

// Predicted class is "claim" when P(claim) >= 0.5. Throws on empty data.
metrics::ClaimMetrics evaluate_worthiness(const WorthinessModel& model, const std::vector<LabeledSentence>& data);

struct CrossValidation {
  std::vector<metrics::ClaimMetrics> folds;
  metrics::ClaimMetrics mean;
};

// Seeded k-fold driver: trains on k-1 folds, evaluates on the held-out fold.
CrossValidation cross_validate_worthiness(const std::vector<LabeledSentence>& data, std::size_t k,
                                          const nn::TrainConfig& config,
                                          std::shared_ptr<const text::EmbeddingTable> embeddings,
                                          std::size_t hidden = kDefaultHidden);

// sentence<TAB>label lines; label in {claim, non-claim}. Throws LoadError
// naming the line.
std::vector<LabeledSentence> read_tsv(std::istream& in);
void write_tsv(std::ostream& out, const std::vector<LabeledSentence>& data);

// Balanced, linearly separable corpus: claim sentences are numeric
// statements of change, non-claim sentences are debate pleasantries. The two
// draw on disjoint content vocabularies.
std::vector<LabeledSentence> synthetic_corpus(std::size_t n, std::uint64_t seed);

}  // namespace factcheck::worthiness
