#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "factcheck/nn/attention.hpp"
#include "factcheck/nn/lstm.hpp"
#include "factcheck/sadhan/claim.hpp"
#include "factcheck/text/embeddings.hpp"

namespace factcheck::sadhan {

struct SadhanDims {
  std::size_t embed_dim = 16;
  std::size_t hidden = 8;  // per direction
  std::size_t aspect_dim = 8;
  std::size_t attention_dim = 16;

  // 100-d embeddings, 200 hidden units per direction.
  static SadhanDims full_scale() { return {100, 200, 100, 200}; }

  std::size_t state_dim() const { return 2 * hidden; }
  bool operator==(const SadhanDims&) const = default;
};

using AspectValues = std::array<std::vector<std::string>, 3>;

// Every trainable tensor. Aspect tables hold one row per known value plus
// row 0, the kind's UNK vector.
struct SadhanParams {
  nn::BiLstmParams word_encoder;      // d -> h
  nn::BiLstmParams sentence_encoder;  // 2h -> h
  nn::BiLstmParams claim_encoder;     // d -> h
  nn::AttentionParams word_attention;
  nn::AttentionParams sentence_attention;
  std::array<Matrix, 3> aspect_tables;  // (1 + values) x aspect_dim
  Matrix head_w;                        // 2 x 4h over [document ; claim]
  Vector head_b;                        // 2

  static SadhanParams zeros(const SadhanDims& dims, const std::array<std::size_t, 3>& aspect_counts);
  static SadhanParams random(const SadhanDims& dims, const std::array<std::size_t, 3>& aspect_counts, nn::Rng& rng);
  nn::TensorList tensors();
};

class SadhanModel {
 public:
  SadhanModel(SadhanDims dims, std::shared_ptr<const text::EmbeddingTable> embeddings, AspectValues aspect_values,
              SadhanParams params);

  static SadhanModel create(const SadhanDims& dims, std::shared_ptr<const text::EmbeddingTable> embeddings,
                            AspectValues aspect_values, std::uint64_t seed);

  const SadhanDims& dims() const { return dims_; }
  const text::EmbeddingTable& embeddings() const { return *embeddings_; }
  std::shared_ptr<const text::EmbeddingTable> embeddings_ptr() const { return embeddings_; }
  const SadhanParams& params() const { return params_; }
  SadhanParams& mutable_params() { return params_; }
  const std::vector<std::string>& aspect_values(AspectKind kind) const {
    return aspect_values_[static_cast<int>(kind)];
  }

  // Row of the aspect table for the claim's value of `kind`; 0 (UNK) when the
  // claim has no such aspect or the value is unknown.
  std::size_t aspect_row(const Claim& claim, AspectKind kind) const;

  SadhanParams zero_gradients() const;

  void save(const std::filesystem::path& path) const;
  // Tensor shapes are checked against the stored dimensions.
  static SadhanModel load(const std::filesystem::path& path);
  // Additionally requires the stored dimensions to equal `expected`.
  static SadhanModel load(const std::filesystem::path& path, const SadhanDims& expected);

 private:
  SadhanDims dims_;
  std::shared_ptr<const text::EmbeddingTable> embeddings_;
  AspectValues aspect_values_;
  std::array<std::unordered_map<std::string, std::size_t>, 3> aspect_index_;
  SadhanParams params_;
};

// Attention weights of one document. Sentences without tokens carry a zero
// sentence weight and no word weights.
struct AttentionMap {
  Vector sentence_weights;          // beta, length S
  std::vector<Vector> word_weights;  // alpha_i, length T_i
  Vector intensities;               // normalised highlight per sentence
};

struct DocumentPrediction {
  Vector probabilities;  // (P(true), P(false))
  AttentionMap attention;
};

// Mean over positions of the claim encoder's Bi-LSTM states. Throws
// ModelError for a claim without tokens.
Vector encode_claim(const SadhanModel& model, const Claim& claim);

// Word Bi-LSTM and claim/aspect-conditioned attention per sentence, then a
// sentence Bi-LSTM and attention over sentence vectors, then a softmax head
// over [document ; claim]. Throws ModelError when every sentence is empty.
DocumentPrediction classify_document(const SadhanModel& model, const Claim& claim, const Document& doc,
                                     AspectKind aspect);

// Aspect kinds present on the claim in canonical order; all three kinds
// (each backed by its UNK vector) when none is present.
std::vector<AspectKind> active_aspects(const Claim& claim);

struct DocumentResult {
  std::size_t index = 0;  // position in the evidence list
  Vector probabilities;   // mean over aspect kinds
  AttentionMap attention;  // weights averaged over aspect kinds
  std::map<AspectKind, Vector> aspect_probabilities;
};

struct CredibilityResult {
  Vector probabilities;  // (P(true), P(false))
  double score = 0.0;    // P(true)
  std::vector<DocumentResult> documents;
  std::map<AspectKind, Vector> aspect_probabilities;  // mean over documents
};

// One classify_document pass per (document, active aspect), averaged over
// aspects and then over documents. Documents without any tokens are
// skipped; nullopt when no usable document remains. Averages are taken over
// sorted terms so the result does not depend on document order.
std::optional<CredibilityResult> predict(const SadhanModel& model, const Claim& claim,
                                         const std::vector<Document>& evidence);

// r_i = beta_i * max_t alpha_{i,t}; intensity_i = r_i / max_j r_j (all zero
// when every r_i is zero).
Vector highlight_intensities(const Vector& sentence_weights, const std::vector<Vector>& word_weights);

struct EvidenceSentence {
  std::size_t index = 0;
  std::string text;
  double intensity = 0.0;
  std::vector<std::pair<std::string, double>> words;
};

// Sentences in document order with highlight intensity and word weights.
std::vector<EvidenceSentence> extract_evidence(const AttentionMap& attention, const std::vector<std::string>& texts,
                                               const Document& doc);

// Cross-entropy of one (document, aspect) sub-prediction and its gradient,
// added into `grad`. Dropout with keep probability `keep_prob` is applied
// to both Bi-LSTM output levels when `dropout_rng` is non-null.
double document_loss_and_gradient(const SadhanModel& model, const Claim& claim, const Document& doc,
                                  AspectKind aspect, Veracity label, SadhanParams& grad, nn::Rng* dropout_rng,
                                  double keep_prob);

}  // namespace factcheck::sadhan
