#include "factcheck/worthiness/model.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "factcheck/error.hpp"
#include "factcheck/io/checkpoint.hpp"
#include "factcheck/nn/batch.hpp"
#include "factcheck/nn/optimizer.hpp"

namespace factcheck::worthiness {
namespace {

constexpr const char* kKind = "worthiness";

std::vector<std::string> word_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    if (text::is_word_token(t)) out.push_back(t);
  return out;
}

struct Forward {
  nn::LstmTrace trace;
  Vector pooled;
  Vector probabilities;
};

Forward run(const WorthinessParams& p, const text::EmbeddingTable& table, const std::vector<std::string>& words) {
  Forward f;
  const Matrix states = nn::lstm_forward(text::embed(words, table), p.lstm, &f.trace);
  f.pooled = states.colwise().mean().transpose();
  // Two-class softmax as a logistic of the logit gap; the complement makes
  // the pair sum to exactly 1.
  const Vector logits = p.out_w * f.pooled + p.out_b;
  const double claim = nn::sigmoid(logits[0] - logits[1]);
  f.probabilities = Vector{{claim, 1.0 - claim}};
  return f;
}

Matrix column(const Vector& v) { return Matrix(v); }

}  // namespace

Label parse_label(std::string_view s) {
  if (s == "claim") return Label::kClaim;
  if (s == "non-claim") return Label::kNonClaim;
  throw std::invalid_argument("unknown worthiness label '" + std::string(s) + "'");
}

std::string_view to_string(Label label) { return label == Label::kClaim ? "claim" : "non-claim"; }

WorthinessParams WorthinessParams::zeros(std::size_t input, std::size_t hidden) {
  const auto h = static_cast<Eigen::Index>(hidden);
  return {nn::LstmParams::zeros(input, hidden), Matrix::Zero(2, h), Vector::Zero(2)};
}

WorthinessParams WorthinessParams::random(std::size_t input, std::size_t hidden, nn::Rng& rng) {
  auto p = zeros(input, hidden);
  p.lstm = nn::LstmParams::random(input, hidden, rng);
  nn::glorot_fill(p.out_w, rng);
  return p;
}

nn::TensorList WorthinessParams::tensors() {
  nn::TensorList out;
  lstm.collect("lstm", out);
  out.push_back(nn::tensor_ref("out.w", out_w));
  out.push_back(nn::tensor_ref("out.b", out_b));
  return out;
}

WorthinessModel::WorthinessModel(std::shared_ptr<const text::EmbeddingTable> embeddings, WorthinessParams params)
    : embeddings_(std::move(embeddings)), params_(std::move(params)) {
  if (!embeddings_) throw std::invalid_argument("worthiness model needs an embedding table");
  if (params_.lstm.input_dim() != embeddings_->dim())
    throw ModelError("worthiness LSTM input size does not match the embedding dimension");
  if (params_.out_w.rows() != 2 || params_.out_w.cols() != static_cast<Eigen::Index>(params_.lstm.hidden_dim()) ||
      params_.out_b.size() != 2)
    throw ModelError("worthiness output layer shape mismatch");
}

WorthinessModel WorthinessModel::create(std::shared_ptr<const text::EmbeddingTable> embeddings, std::size_t hidden,
                                        std::uint64_t seed) {
  nn::Rng rng(seed);
  const auto dim = embeddings->dim();
  return WorthinessModel(std::move(embeddings), WorthinessParams::random(dim, hidden, rng));
}

Vector WorthinessModel::probabilities(const std::vector<std::string>& tokens) const {
  const auto words = word_tokens(tokens);
  if (words.empty()) return Vector{{0.0, 1.0}};
  return run(params_, *embeddings_, words).probabilities;
}

ScoredSentence WorthinessModel::score_sentence(const text::Sentence& sentence) const {
  return {sentence, probabilities(text::tokenize(sentence.text))[0]};
}

double WorthinessModel::loss_and_gradient(const std::vector<std::string>& tokens, Label label,
                                          WorthinessParams& grad) const {
  const auto words = word_tokens(tokens);
  if (words.empty()) return 0.0;
  const Forward f = run(params_, *embeddings_, words);
  const int y = static_cast<int>(label);

  Vector d_logits = f.probabilities;
  d_logits[y] -= 1.0;
  grad.out_w += d_logits * f.pooled.transpose();
  grad.out_b += d_logits;
  const Vector d_pooled = params_.out_w.transpose() * d_logits;
  const auto T = f.trace.h.rows();
  Matrix d_states = d_pooled.transpose().replicate(T, 1) / static_cast<double>(T);
  nn::lstm_backward(d_states, params_.lstm, f.trace, grad.lstm);
  return -std::log(f.probabilities[y]);
}

void WorthinessModel::save(const std::filesystem::path& path) const {
  io::Archive a(kKind);
  a.put("embed_dim", static_cast<std::int64_t>(embeddings_->dim()));
  a.put("hidden", static_cast<std::int64_t>(hidden()));
  a.put("vocabulary", embeddings_->vocabulary().tokens());
  a.put("embeddings", embeddings_->weights());
  a.put("lstm.w", params_.lstm.w);
  a.put("lstm.u", params_.lstm.u);
  a.put("lstm.b", column(params_.lstm.b));
  a.put("out.w", params_.out_w);
  a.put("out.b", column(params_.out_b));
  a.save(path);
}

WorthinessModel WorthinessModel::load(const std::filesystem::path& path) {
  const auto a = io::Archive::load(path, kKind);
  const auto d = a.get_int("embed_dim");
  const auto h = a.get_int("hidden");
  if (d <= 0 || h <= 0) throw LoadError("checkpoint dimensions must be positive");
  const auto& tokens = a.get_strings("vocabulary");
  if (tokens.size() < 2 || tokens[0] != text::Vocabulary::kPadToken || tokens[1] != text::Vocabulary::kUnkToken)
    throw LoadError("checkpoint field 'vocabulary' lacks the special tokens");
  auto vocab = std::make_shared<const text::Vocabulary>(
      text::Vocabulary::from_tokens(std::vector<std::string>(tokens.begin() + 2, tokens.end())));
  if (vocab->size() != tokens.size()) throw LoadError("checkpoint field 'vocabulary' has duplicate tokens");
  const auto V = static_cast<Eigen::Index>(vocab->size());
  auto table = std::make_shared<const text::EmbeddingTable>(vocab, a.get_matrix("embeddings", V, d));

  WorthinessParams p = WorthinessParams::zeros(static_cast<std::size_t>(d), static_cast<std::size_t>(h));
  p.lstm.w = a.get_matrix("lstm.w", 4 * h, d);
  p.lstm.u = a.get_matrix("lstm.u", 4 * h, h);
  p.lstm.b = a.get_matrix("lstm.b", 4 * h, 1).col(0);
  p.out_w = a.get_matrix("out.w", 2, h);
  p.out_b = a.get_matrix("out.b", 2, 1).col(0);
  return WorthinessModel(std::move(table), std::move(p));
}

std::vector<ScoredSentence> rank_scored(std::vector<ScoredSentence> scored, double threshold, std::size_t top_k) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("claim threshold must be in [0, 1]");
  std::erase_if(scored, [&](const ScoredSentence& s) { return !(s.score >= threshold); });
  std::sort(scored.begin(), scored.end(), [](const ScoredSentence& a, const ScoredSentence& b) {
    return a.score != b.score ? a.score > b.score : a.sentence.index < b.sentence.index;
  });
  if (scored.size() > top_k) scored.resize(top_k);
  return scored;
}

std::vector<ScoredSentence> rank_claims(const WorthinessModel& model, std::span<const text::Sentence> sentences,
                                        double threshold, std::size_t top_k) {
  std::vector<ScoredSentence> scored(sentences.size());
  const auto n = static_cast<long>(sentences.size());
#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (long i = 0; i < n; ++i) scored[static_cast<std::size_t>(i)] = model.score_sentence(sentences[static_cast<std::size_t>(i)]);
  return rank_scored(std::move(scored), threshold, top_k);
}

std::vector<ScoredSentence> rank_claims(const WorthinessModel& model, const retrieval::Article& article,
                                        double threshold, std::size_t top_k) {
  return rank_claims(model, std::span<const text::Sentence>(article.sentences), threshold, top_k);
}

metrics::ClaimMetrics evaluate_worthiness(const WorthinessModel& model, const std::vector<LabeledSentence>& data) {
  if (data.empty()) throw std::invalid_argument("evaluate_worthiness: empty dataset");
  std::vector<int> predicted(data.size()), gold(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    predicted[i] = model.probabilities(text::tokenize(data[i].text))[0] >= 0.5 ? 0 : 1;
    gold[i] = static_cast<int>(data[i].label);
  }
  return metrics::claim_metrics(predicted, gold);
}

WorthinessTrainResult train_worthiness(const std::vector<LabeledSentence>& data, const nn::TrainConfig& config,
                                       std::shared_ptr<const text::EmbeddingTable> embeddings, std::size_t hidden,
                                       const std::vector<LabeledSentence>* validation) {
  config.validate();
  if (hidden == 0) throw std::invalid_argument("hidden size must be positive");
  struct Item {
    std::vector<std::string> tokens;
    Label label;
  };
  std::vector<Item> items;
  bool has[2] = {false, false};
  for (const auto& s : data) {
    auto tokens = word_tokens(text::tokenize(s.text));
    if (tokens.empty()) continue;
    has[static_cast<int>(s.label)] = true;
    items.push_back({std::move(tokens), s.label});
  }
  if (!has[0] || !has[1]) throw TrainingError("worthiness training data needs both claim and non-claim sentences");
  const auto& val = validation && !validation->empty() ? *validation : data;

  WorthinessModel model = WorthinessModel::create(std::move(embeddings), hidden, config.seed);
  const std::size_t d = model.embeddings().dim();
  auto make_zero = [&] { return WorthinessParams::zeros(d, hidden); };

  auto full_loss = [&] {
    double loss = 0.0;
    for (const auto& it : items) loss -= std::log(model.probabilities(it.tokens)[static_cast<int>(it.label)]);
    return loss / static_cast<double>(items.size());
  };

  WorthinessTrainResult result{model, {}, 0};
  result.history.push_back({0, full_loss(), evaluate_worthiness(model, val).micro_f1});
  double best = -1.0;  // epoch 0 is reported but never selected

  nn::Optimizer optimizer(config.optimizer, config.learning_rate);
  std::vector<std::size_t> order(items.size());
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    nn::Rng rng(nn::mix_seed(config.seed, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - begin);
      WorthinessParams grad = make_zero();
      nn::accumulate_gradients(
          n, grad, make_zero,
          [&](std::size_t k, WorthinessParams& g) {
            const auto& it = items[order[begin + k]];
            return model.loss_and_gradient(it.tokens, it.label, g);
          },
          config.parallel);
      const auto grads = grad.tensors();
      nn::scale(grads, 1.0 / static_cast<double>(n));
      optimizer.step(model.mutable_params().tensors(), grads);
    }
    if (!nn::all_finite(model.mutable_params().tensors()))
      throw TrainingError("worthiness parameters diverged at epoch " + std::to_string(epoch));
    const double score = evaluate_worthiness(model, val).micro_f1;
    result.history.push_back({epoch, full_loss(), score});
    if (score > best) {
      best = score;
      result.model = model;
      result.best_epoch = epoch;
    }
  }
  return result;
}

CrossValidation cross_validate_worthiness(const std::vector<LabeledSentence>& data, std::size_t k,
                                          const nn::TrainConfig& config,
                                          std::shared_ptr<const text::EmbeddingTable> embeddings, std::size_t hidden) {
  const auto folds = metrics::kfold_split(data.size(), k, config.seed);
  CrossValidation cv;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<LabeledSentence> train, test;
    for (auto i : metrics::training_indices(folds, f, data.size())) train.push_back(data[i]);
    for (auto i : folds[f]) test.push_back(data[i]);
    auto trained = train_worthiness(train, config, embeddings, hidden);
    cv.folds.push_back(evaluate_worthiness(trained.model, test));
  }
  for (const auto& m : cv.folds) {
    cv.mean.precision += m.precision / static_cast<double>(k);
    cv.mean.recall += m.recall / static_cast<double>(k);
    cv.mean.micro_f1 += m.micro_f1 / static_cast<double>(k);
  }
  return cv;
}

}  // namespace factcheck::worthiness
