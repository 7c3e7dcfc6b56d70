#include "factcheck/sadhan/model.hpp"

#include <algorithm>
#include <exception>
#include <random>
#include <stdexcept>

#include "factcheck/error.hpp"
#include "factcheck/io/checkpoint.hpp"

namespace factcheck::sadhan {
namespace {

constexpr const char* kKind = "sadhan";

std::string aspect_field(AspectKind kind) { return "aspect." + std::string(to_string(kind)) + ".values"; }

struct SentenceTrace {
  Matrix x;
  nn::BiLstmTrace lstm;
  Matrix mask;     // empty when dropout is off
  Matrix dropped;  // states after dropout
  nn::AttentionOutput attention;
};

struct ForwardTrace {
  nn::BiLstmTrace claim_lstm;
  Eigen::Index claim_length = 0;
  Vector claim_vec;
  std::size_t aspect_row = 0;
  Vector aspect_vec;
  std::vector<std::size_t> kept;  // document indices of non-empty sentences
  std::vector<SentenceTrace> sentences;
  nn::BiLstmTrace sentence_lstm;
  Matrix sentence_mask;
  Matrix sentence_dropped;
  nn::AttentionOutput sentence_attention;
  Vector features;
  Vector probabilities;
};

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, nn::Rng* rng, double keep_prob) {
  if (!rng || keep_prob >= 1.0) return {};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix mask(rows, cols);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = u(*rng) < keep_prob ? 1.0 / keep_prob : 0.0;
  return mask;
}

Matrix apply_mask(const Matrix& states, const Matrix& mask) {
  return mask.size() == 0 ? states : Matrix(states.cwiseProduct(mask));
}

ForwardTrace forward(const SadhanModel& model, const Claim& claim, const Document& doc, AspectKind aspect,
                     nn::Rng* rng, double keep_prob) {
  const auto& p = model.params();
  if (claim.tokens.empty()) throw ModelError("claim has no tokens");
  ForwardTrace t;
  const Matrix claim_states = nn::bilstm_encode(text::embed(claim.tokens, model.embeddings()), p.claim_encoder, &t.claim_lstm);
  t.claim_length = claim_states.rows();
  t.claim_vec = claim_states.colwise().mean().transpose();
  t.aspect_row = model.aspect_row(claim, aspect);
  t.aspect_vec = p.aspect_tables[static_cast<int>(aspect)].row(static_cast<Eigen::Index>(t.aspect_row)).transpose();

  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (doc[i].empty()) continue;
    SentenceTrace s;
    s.x = text::embed(doc[i], model.embeddings());
    const Matrix states = nn::bilstm_encode(s.x, p.word_encoder, &s.lstm);
    s.mask = dropout_mask(states.rows(), states.cols(), rng, keep_prob);
    s.dropped = apply_mask(states, s.mask);
    s.attention = nn::conditioned_attention(s.dropped, t.claim_vec, t.aspect_vec, p.word_attention);
    t.kept.push_back(i);
    t.sentences.push_back(std::move(s));
  }
  if (t.sentences.empty()) throw ModelError("document has no non-empty sentence");

  const auto S = static_cast<Eigen::Index>(t.sentences.size());
  Matrix inputs(S, static_cast<Eigen::Index>(model.dims().state_dim()));
  for (Eigen::Index k = 0; k < S; ++k) inputs.row(k) = t.sentences[static_cast<std::size_t>(k)].attention.context.transpose();
  const Matrix states = nn::bilstm_encode(inputs, p.sentence_encoder, &t.sentence_lstm);
  t.sentence_mask = dropout_mask(states.rows(), states.cols(), rng, keep_prob);
  t.sentence_dropped = apply_mask(states, t.sentence_mask);
  t.sentence_attention = nn::conditioned_attention(t.sentence_dropped, t.claim_vec, t.aspect_vec, p.sentence_attention);

  t.features.resize(2 * static_cast<Eigen::Index>(model.dims().state_dim()));
  t.features << t.sentence_attention.context, t.claim_vec;
  t.probabilities = nn::softmax(p.head_w * t.features + p.head_b);
  return t;
}

AttentionMap attention_map(const ForwardTrace& t, std::size_t n_sentences) {
  AttentionMap map;
  map.sentence_weights = Vector::Zero(static_cast<Eigen::Index>(n_sentences));
  map.word_weights.assign(n_sentences, Vector());
  for (std::size_t k = 0; k < t.kept.size(); ++k) {
    map.sentence_weights[static_cast<Eigen::Index>(t.kept[k])] = t.sentence_attention.weights[static_cast<Eigen::Index>(k)];
    map.word_weights[t.kept[k]] = t.sentences[k].attention.weights;
  }
  map.intensities = highlight_intensities(map.sentence_weights, map.word_weights);
  return map;
}

bool has_tokens(const Document& doc) {
  return std::any_of(doc.begin(), doc.end(), [](const auto& s) { return !s.empty(); });
}

// Sum of the values in ascending order, divided by their count.
double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

SadhanParams SadhanParams::zeros(const SadhanDims& dims, const std::array<std::size_t, 3>& aspect_counts) {
  const auto d = dims.embed_dim, h = dims.hidden, m = dims.state_dim();
  SadhanParams p{nn::BiLstmParams::zeros(d, h),
                 nn::BiLstmParams::zeros(m, h),
                 nn::BiLstmParams::zeros(d, h),
                 nn::AttentionParams::zeros(dims.attention_dim, m, m, dims.aspect_dim),
                 nn::AttentionParams::zeros(dims.attention_dim, m, m, dims.aspect_dim),
                 {},
                 Matrix::Zero(2, 2 * static_cast<Eigen::Index>(m)),
                 Vector::Zero(2)};
  for (std::size_t k = 0; k < 3; ++k)
    p.aspect_tables[k] = Matrix::Zero(static_cast<Eigen::Index>(aspect_counts[k] + 1), static_cast<Eigen::Index>(dims.aspect_dim));
  return p;
}

SadhanParams SadhanParams::random(const SadhanDims& dims, const std::array<std::size_t, 3>& aspect_counts,
                                  nn::Rng& rng) {
  const auto d = dims.embed_dim, h = dims.hidden, m = dims.state_dim();
  SadhanParams p = zeros(dims, aspect_counts);
  p.word_encoder = nn::BiLstmParams::random(d, h, rng);
  p.sentence_encoder = nn::BiLstmParams::random(m, h, rng);
  p.claim_encoder = nn::BiLstmParams::random(d, h, rng);
  p.word_attention = nn::AttentionParams::random(dims.attention_dim, m, m, dims.aspect_dim, rng);
  p.sentence_attention = nn::AttentionParams::random(dims.attention_dim, m, m, dims.aspect_dim, rng);
  for (auto& table : p.aspect_tables) nn::glorot_fill(table, rng);
  nn::glorot_fill(p.head_w, rng);
  return p;
}

nn::TensorList SadhanParams::tensors() {
  nn::TensorList out;
  word_encoder.collect("word_encoder", out);
  sentence_encoder.collect("sentence_encoder", out);
  claim_encoder.collect("claim_encoder", out);
  word_attention.collect("word_attention", out);
  sentence_attention.collect("sentence_attention", out);
  for (auto kind : kAspectKinds)
    out.push_back(nn::tensor_ref("aspect." + std::string(to_string(kind)), aspect_tables[static_cast<int>(kind)]));
  out.push_back(nn::tensor_ref("head.w", head_w));
  out.push_back(nn::tensor_ref("head.b", head_b));
  return out;
}

SadhanModel::SadhanModel(SadhanDims dims, std::shared_ptr<const text::EmbeddingTable> embeddings,
                         AspectValues aspect_values, SadhanParams params)
    : dims_(dims), embeddings_(std::move(embeddings)), aspect_values_(std::move(aspect_values)), params_(std::move(params)) {
  if (!embeddings_) throw std::invalid_argument("model needs an embedding table");
  if (embeddings_->dim() != dims_.embed_dim) throw ModelError("embedding dimension does not match model dimensions");
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < aspect_values_[k].size(); ++i)
      if (!aspect_index_[k].emplace(aspect_values_[k][i], i + 1).second)
        throw ModelError("duplicate aspect value '" + aspect_values_[k][i] + "'");
  }
  // Shapes must match a freshly built parameter set.
  auto expected = SadhanParams::zeros(dims_, {aspect_values_[0].size(), aspect_values_[1].size(), aspect_values_[2].size()});
  const auto want = expected.tensors();
  const auto have = params_.tensors();
  if (want.size() != have.size()) throw ModelError("parameter layout mismatch");
  for (std::size_t i = 0; i < want.size(); ++i)
    if (want[i].rows != have[i].rows || want[i].cols != have[i].cols)
      throw ModelError("parameter '" + want[i].name + "' has the wrong shape");
}

SadhanModel SadhanModel::create(const SadhanDims& dims, std::shared_ptr<const text::EmbeddingTable> embeddings,
                                AspectValues aspect_values, std::uint64_t seed) {
  nn::Rng rng(seed);
  auto params = SadhanParams::random(dims, {aspect_values[0].size(), aspect_values[1].size(), aspect_values[2].size()}, rng);
  return SadhanModel(dims, std::move(embeddings), std::move(aspect_values), std::move(params));
}

std::size_t SadhanModel::aspect_row(const Claim& claim, AspectKind kind) const {
  auto it = claim.aspects.find(kind);
  if (it == claim.aspects.end()) return 0;
  const auto& index = aspect_index_[static_cast<int>(kind)];
  auto found = index.find(it->second);
  return found == index.end() ? 0 : found->second;
}

SadhanParams SadhanModel::zero_gradients() const {
  return SadhanParams::zeros(dims_, {aspect_values_[0].size(), aspect_values_[1].size(), aspect_values_[2].size()});
}

void SadhanModel::save(const std::filesystem::path& path) const {
  io::Archive a(kKind);
  a.put("embed_dim", static_cast<std::int64_t>(dims_.embed_dim));
  a.put("hidden", static_cast<std::int64_t>(dims_.hidden));
  a.put("aspect_dim", static_cast<std::int64_t>(dims_.aspect_dim));
  a.put("attention_dim", static_cast<std::int64_t>(dims_.attention_dim));
  a.put("vocabulary", embeddings_->vocabulary().tokens());
  a.put("embeddings", embeddings_->weights());
  for (auto kind : kAspectKinds) a.put(aspect_field(kind), aspect_values_[static_cast<int>(kind)]);
  auto params = params_;
  for (const auto& t : params.tensors())
    a.put(t.name, Matrix(Eigen::Map<const Matrix>(t.values.data(), t.rows, t.cols)));
  a.save(path);
}

SadhanModel SadhanModel::load(const std::filesystem::path& path) {
  const auto a = io::Archive::load(path, kKind);
  auto dim = [&](const char* name) {
    const auto v = a.get_int(name);
    if (v <= 0) throw LoadError(std::string("checkpoint field '") + name + "' must be positive");
    return static_cast<std::size_t>(v);
  };
  SadhanDims dims{dim("embed_dim"), dim("hidden"), dim("aspect_dim"), dim("attention_dim")};

  const auto& tokens = a.get_strings("vocabulary");
  if (tokens.size() < 2 || tokens[0] != text::Vocabulary::kPadToken || tokens[1] != text::Vocabulary::kUnkToken)
    throw LoadError("checkpoint field 'vocabulary' lacks the special tokens");
  auto vocab = std::make_shared<const text::Vocabulary>(
      text::Vocabulary::from_tokens(std::vector<std::string>(tokens.begin() + 2, tokens.end())));
  if (vocab->size() != tokens.size()) throw LoadError("checkpoint field 'vocabulary' has duplicate tokens");
  auto table = std::make_shared<const text::EmbeddingTable>(
      vocab, a.get_matrix("embeddings", static_cast<Eigen::Index>(vocab->size()), static_cast<Eigen::Index>(dims.embed_dim)));

  AspectValues values;
  for (auto kind : kAspectKinds) values[static_cast<int>(kind)] = a.get_strings(aspect_field(kind));
  auto params = SadhanParams::zeros(dims, {values[0].size(), values[1].size(), values[2].size()});
  for (const auto& t : params.tensors()) {
    const auto& m = a.get_matrix(t.name, t.rows, t.cols);
    std::copy(m.data(), m.data() + m.size(), t.values.begin());
  }
  return SadhanModel(dims, std::move(table), std::move(values), std::move(params));
}

SadhanModel SadhanModel::load(const std::filesystem::path& path, const SadhanDims& expected) {
  auto model = load(path);
  const auto& got = model.dims();
  auto check = [](const char* name, std::size_t have, std::size_t want) {
    if (have != want)
      throw LoadError(std::string("checkpoint dimension '") + name + "' is " + std::to_string(have) + ", expected " +
                      std::to_string(want));
  };
  check("embed_dim", got.embed_dim, expected.embed_dim);
  check("hidden", got.hidden, expected.hidden);
  check("aspect_dim", got.aspect_dim, expected.aspect_dim);
  check("attention_dim", got.attention_dim, expected.attention_dim);
  return model;
}

Vector encode_claim(const SadhanModel& model, const Claim& claim) {
  if (claim.tokens.empty()) throw ModelError("claim has no tokens");
  const Matrix states = nn::bilstm_encode(text::embed(claim.tokens, model.embeddings()), model.params().claim_encoder);
  return states.colwise().mean().transpose();
}

DocumentPrediction classify_document(const SadhanModel& model, const Claim& claim, const Document& doc,
                                     AspectKind aspect) {
  const auto t = forward(model, claim, doc, aspect, nullptr, 1.0);
  return {t.probabilities, attention_map(t, doc.size())};
}

std::vector<AspectKind> active_aspects(const Claim& claim) {
  std::vector<AspectKind> kinds;
  for (auto kind : kAspectKinds)
    if (claim.aspects.count(kind)) kinds.push_back(kind);
  if (kinds.empty()) kinds.assign(kAspectKinds.begin(), kAspectKinds.end());
  return kinds;
}

std::optional<CredibilityResult> predict(const SadhanModel& model, const Claim& claim,
                                         const std::vector<Document>& evidence) {
  if (claim.tokens.empty()) throw ModelError("claim has no tokens");
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < evidence.size(); ++i)
    if (has_tokens(evidence[i])) usable.push_back(i);
  if (usable.empty()) return std::nullopt;

  const auto aspects = active_aspects(claim);
  const std::size_t n_aspects = aspects.size();
  const auto n_jobs = static_cast<long>(usable.size() * n_aspects);
  std::vector<DocumentPrediction> runs(static_cast<std::size_t>(n_jobs));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (n_jobs > 1)
  for (long j = 0; j < n_jobs; ++j) {
    try {
      const auto doc = usable[static_cast<std::size_t>(j) / n_aspects];
      const auto kind = aspects[static_cast<std::size_t>(j) % n_aspects];
      runs[static_cast<std::size_t>(j)] = classify_document(model, claim, evidence[doc], kind);
    } catch (...) {
#pragma omp critical(factcheck_predict_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  CredibilityResult result;
  const double inv_aspects = 1.0 / static_cast<double>(n_aspects);
  for (std::size_t d = 0; d < usable.size(); ++d) {
    DocumentResult doc;
    doc.index = usable[d];
    doc.probabilities = Vector::Zero(2);
    const auto& first = runs[d * n_aspects].attention;
    doc.attention.sentence_weights = Vector::Zero(first.sentence_weights.size());
    doc.attention.word_weights.resize(first.word_weights.size());
    for (std::size_t i = 0; i < first.word_weights.size(); ++i)
      doc.attention.word_weights[i] = Vector::Zero(first.word_weights[i].size());
    for (std::size_t a = 0; a < n_aspects; ++a) {
      const auto& run = runs[d * n_aspects + a];
      doc.aspect_probabilities[aspects[a]] = run.probabilities;
      doc.probabilities += run.probabilities;
      doc.attention.sentence_weights += run.attention.sentence_weights;
      for (std::size_t i = 0; i < run.attention.word_weights.size(); ++i)
        doc.attention.word_weights[i] += run.attention.word_weights[i];
    }
    doc.probabilities *= inv_aspects;
    doc.attention.sentence_weights *= inv_aspects;
    for (auto& w : doc.attention.word_weights) w *= inv_aspects;
    doc.attention.intensities = highlight_intensities(doc.attention.sentence_weights, doc.attention.word_weights);
    result.documents.push_back(std::move(doc));
  }

  auto mean_over_documents = [&](auto&& value_of) {
    Vector out(2);
    for (int c = 0; c < 2; ++c) {
      std::vector<double> values;
      for (const auto& doc : result.documents) values.push_back(value_of(doc)[c]);
      out[c] = sorted_mean(std::move(values));
    }
    return out;
  };
  result.probabilities = mean_over_documents([](const DocumentResult& d) -> const Vector& { return d.probabilities; });
  for (auto kind : aspects)
    result.aspect_probabilities[kind] =
        mean_over_documents([kind](const DocumentResult& d) -> const Vector& { return d.aspect_probabilities.at(kind); });
  result.score = result.probabilities[0];
  return result;
}

Vector highlight_intensities(const Vector& sentence_weights, const std::vector<Vector>& word_weights) {
  const auto S = sentence_weights.size();
  Vector raw = Vector::Zero(S);
  for (Eigen::Index i = 0; i < S; ++i) {
    const auto& alpha = word_weights.at(static_cast<std::size_t>(i));
    if (alpha.size() > 0) raw[i] = sentence_weights[i] * alpha.maxCoeff();
  }
  const double top = S > 0 ? raw.maxCoeff() : 0.0;
  if (top > 0.0) raw /= top;
  return raw;
}

std::vector<EvidenceSentence> extract_evidence(const AttentionMap& attention, const std::vector<std::string>& texts,
                                               const Document& doc) {
  const auto S = static_cast<std::size_t>(attention.sentence_weights.size());
  const Vector intensities = attention.intensities.size() == static_cast<Eigen::Index>(S)
                                 ? attention.intensities
                                 : highlight_intensities(attention.sentence_weights, attention.word_weights);
  std::vector<EvidenceSentence> out;
  out.reserve(S);
  for (std::size_t i = 0; i < S; ++i) {
    EvidenceSentence e;
    e.index = i;
    e.text = i < texts.size() ? texts[i] : std::string{};
    e.intensity = intensities[static_cast<Eigen::Index>(i)];
    const auto& alpha = attention.word_weights.at(i);
    for (Eigen::Index t = 0; t < alpha.size(); ++t)
      e.words.emplace_back(i < doc.size() && static_cast<std::size_t>(t) < doc[i].size() ? doc[i][static_cast<std::size_t>(t)] : std::string{},
                           alpha[t]);
    out.push_back(std::move(e));
  }
  return out;
}

double document_loss_and_gradient(const SadhanModel& model, const Claim& claim, const Document& doc,
                                  AspectKind aspect, Veracity label, SadhanParams& grad, nn::Rng* dropout_rng,
                                  double keep_prob) {
  const auto& p = model.params();
  const auto t = forward(model, claim, doc, aspect, dropout_rng, keep_prob);
  const int y = static_cast<int>(label);
  const auto m = static_cast<Eigen::Index>(model.dims().state_dim());

  Vector d_logits = t.probabilities;
  d_logits[y] -= 1.0;
  grad.head_w += d_logits * t.features.transpose();
  grad.head_b += d_logits;
  const Vector d_features = p.head_w.transpose() * d_logits;
  Vector d_claim = d_features.tail(m);

  auto sent = nn::attention_backward(d_features.head(m), t.sentence_dropped, t.claim_vec, t.aspect_vec,
                                     p.sentence_attention, t.sentence_attention, grad.sentence_attention);
  d_claim += sent.d_claim;
  Vector d_aspect = sent.d_aspect;
  const Matrix d_sentence_states = apply_mask(sent.d_states, t.sentence_mask);
  const Matrix d_inputs = nn::bilstm_backward(d_sentence_states, p.sentence_encoder, t.sentence_lstm, grad.sentence_encoder);

  for (std::size_t k = 0; k < t.sentences.size(); ++k) {
    const auto& s = t.sentences[k];
    auto word = nn::attention_backward(d_inputs.row(static_cast<Eigen::Index>(k)).transpose(), s.dropped, t.claim_vec,
                                       t.aspect_vec, p.word_attention, s.attention, grad.word_attention);
    d_claim += word.d_claim;
    d_aspect += word.d_aspect;
    nn::bilstm_backward(apply_mask(word.d_states, s.mask), p.word_encoder, s.lstm, grad.word_encoder);
  }

  grad.aspect_tables[static_cast<int>(aspect)].row(static_cast<Eigen::Index>(t.aspect_row)) += d_aspect.transpose();
  const Matrix d_claim_states =
      d_claim.transpose().replicate(t.claim_length, 1) / static_cast<double>(t.claim_length);
  nn::bilstm_backward(d_claim_states, p.claim_encoder, t.claim_lstm, grad.claim_encoder);
  return -std::log(t.probabilities[y]);
}

}  // namespace factcheck::sadhan
