#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "factcheck/metrics.hpp"
#include "factcheck/nn/train_config.hpp"
#include "factcheck/sadhan/model.hpp"
#include "factcheck/text/vocabulary.hpp"

namespace factcheck::sadhan {

struct EvidenceDocument {
  std::string name;                    // file name or url
  std::vector<std::string> sentences;  // raw sentence text
  Document tokens;                     // tokenize() of each sentence
};

struct Example {
  std::string id;
  Claim claim;
  std::vector<EvidenceDocument> evidence;
  Veracity label = Veracity::kTrue;
};

std::vector<Document> documents_of(const Example& example);

// One sub-directory per example holding claim.txt, label, optional aspects
// (key=value lines) and evidence/*.txt, one evidence document per file.
// Examples are returned in directory-name order. Throws LoadError naming the
// offending file.
std::vector<Example> load_dataset(const std::filesystem::path& dir);
void write_dataset(const std::filesystem::path& dir, const std::vector<Example>& examples);

// Reads the evidence/*.txt layout of a single example directory.
std::vector<EvidenceDocument> load_evidence_dir(const std::filesystem::path& dir);

// Small separable dataset: true claims come with confirming evidence, false
// ones with debunking evidence; aspects cycle through a few values.
std::vector<Example> toy_dataset(std::size_t n, std::uint64_t seed);

// Vocabulary over claim and evidence tokens (min_count 1).
text::Vocabulary dataset_vocabulary(const std::vector<Example>& examples);

// Sorted distinct aspect values per kind.
AspectValues collect_aspect_values(const std::vector<Example>& examples);

// Mean cross-entropy over the example's (active aspect, document)
// sub-predictions; the gradient is added into `grad`.
double example_loss_and_gradient(const SadhanModel& model, const Example& example, SadhanParams& grad,
                                 nn::Rng* dropout_rng, double keep_prob);

// Same loss without gradients or dropout.
double example_loss(const SadhanModel& model, const Example& example);

struct SadhanTrainResult {
  SadhanModel model;  // parameters of the best validation epoch
  std::vector<nn::EpochStats> history;
  std::size_t best_epoch = 0;
};

// Mini-batch training with dropout on both Bi-LSTM output levels. Model
// selection uses validation macro-F1 (training data when no validation set
// is given). Throws TrainingError for single-label data or an example with
// no usable evidence.
SadhanTrainResult train_sadhan(const std::vector<Example>& data, const nn::TrainConfig& config,
                               const SadhanDims& dims, std::shared_ptr<const text::EmbeddingTable> embeddings,
                               const std::vector<Example>* validation = nullptr);

// P(false) per example through predict(). Throws ModelError when an example
// has no usable evidence and std::invalid_argument for an empty dataset.
std::vector<double> false_probabilities(const SadhanModel& model, const std::vector<Example>& data);

metrics::CredibilityMetrics evaluate_sadhan(const SadhanModel& model, const std::vector<Example>& data);

struct SadhanCrossValidation {
  std::vector<metrics::CredibilityMetrics> folds;
  metrics::CredibilityMetrics mean;  // NaN fold AUCs are skipped
};

SadhanCrossValidation cross_validate_sadhan(const std::vector<Example>& data, std::size_t k,
                                            const nn::TrainConfig& config, const SadhanDims& dims,
                                            std::shared_ptr<const text::EmbeddingTable> embeddings);

}  // namespace factcheck::sadhan
