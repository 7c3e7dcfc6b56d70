#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "factcheck/error.hpp"
#include "factcheck/sadhan/model.hpp"
#include "factcheck/sadhan/train.hpp"
#include "support/gradcheck.hpp"
#include "support/scalar_sadhan.hpp"

using namespace factcheck;
using namespace factcheck::sadhan;
namespace fs = std::filesystem;

namespace {

const SadhanDims kSmall{6, 3, 4, 5};

std::shared_ptr<const text::EmbeddingTable> toy_table(std::size_t dim, std::uint64_t seed = 3) {
  auto vocab = std::make_shared<const text::Vocabulary>(text::Vocabulary::from_tokens(
      {"vaccines", "cause", "autism", "studies", "show", "no", "link", "doctors", "agree", "claim", "false", "."}));
  return std::make_shared<const text::EmbeddingTable>(text::random_embeddings(vocab, dim, seed, 0.8));
}

SadhanModel toy_model(std::uint64_t seed = 17) {
  AspectValues values{{{"alice", "bob"}, {"health"}, {"news.example"}}};
  auto model = SadhanModel::create(kSmall, toy_table(kSmall.embed_dim), values, seed);
  // Non-trivial biases so that every parameter path is exercised.
  nn::Rng rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  auto& p = model.mutable_params();
  for (auto* v : {&p.word_attention.bias, &p.sentence_attention.bias, &p.head_b})
    for (auto& x : *v) x = u(rng);
  return model;
}

Claim toy_claim() {
  return Claim::from_text("Vaccines cause autism",
                          {{AspectKind::kAuthor, "alice"}, {AspectKind::kTopic, "health"}, {AspectKind::kDomain, "news.example"}});
}

Document toy_doc() { return {{"studies", "show", "no"}, {"doctors", "agree"}}; }

fs::path temp_path(const std::string& name) {
  auto dir = fs::temp_directory_path() / "factcheck_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("classify_document matches the scalar reference") {
  const auto model = toy_model();
  const auto claim = toy_claim();
  const Document doc{{"studies", "show", "no"}, {"doctors", "agree", "."}};
  for (auto kind : kAspectKinds) {
    const auto fast = classify_document(model, claim, doc, kind);
    const auto ref = testsupport::scalar::classify(model, claim, doc, kind);
    for (int c = 0; c < 2; ++c) CHECK(std::abs(fast.probabilities[c] - ref.probabilities[static_cast<std::size_t>(c)]) < 1e-10);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(fast.attention.sentence_weights[i] - ref.sentence_weights[static_cast<std::size_t>(i)]) < 1e-10);
      for (int t = 0; t < 3; ++t)
        CHECK(std::abs(fast.attention.word_weights[static_cast<std::size_t>(i)][t] -
                       ref.word_weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]) < 1e-10);
    }
  }
}

TEST_CASE("classify_document output is normalised") {
  const auto model = toy_model();
  const auto out = classify_document(model, toy_claim(), toy_doc(), AspectKind::kTopic);
  CHECK(out.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.attention.sentence_weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.attention.intensities.maxCoeff() == 1.0);

  const auto single = classify_document(model, toy_claim(), {{"doctors", "agree"}}, AspectKind::kAuthor);
  CHECK(single.attention.sentence_weights[0] == 1.0);
}

TEST_CASE("empty sentences get zero weight; all-empty documents are rejected") {
  const auto model = toy_model();
  const auto out = classify_document(model, toy_claim(), {{}, {"doctors", "agree"}}, AspectKind::kTopic);
  CHECK(out.attention.sentence_weights[0] == 0.0);
  CHECK(out.attention.sentence_weights[1] == 1.0);
  CHECK(out.attention.word_weights[0].size() == 0);
  CHECK_THROWS_AS(classify_document(model, toy_claim(), {{}, {}}, AspectKind::kTopic), ModelError);
  CHECK_THROWS_AS(classify_document(model, Claim::from_text("   "), toy_doc(), AspectKind::kTopic), ModelError);
}

TEST_CASE("encode_claim of one token is that position's state") {
  const auto model = toy_model();
  const auto claim = Claim::from_text("vaccines");
  const Matrix states = nn::bilstm_encode(text::embed(claim.tokens, model.embeddings()), model.params().claim_encoder);
  CHECK(encode_claim(model, claim) == states.row(0).transpose());
  CHECK_THROWS_AS(encode_claim(model, Claim::from_text("")), ModelError);
  CHECK(encode_claim(model, toy_claim()) == encode_claim(model, toy_claim()));
}

TEST_CASE("unknown or missing aspects use the UNK row") {
  const auto model = toy_model();
  CHECK(model.aspect_row(toy_claim(), AspectKind::kAuthor) == 1);
  CHECK(model.aspect_row(Claim::from_text("x", {{AspectKind::kAuthor, "bob"}}), AspectKind::kAuthor) == 2);
  CHECK(model.aspect_row(Claim::from_text("x", {{AspectKind::kAuthor, "zed"}}), AspectKind::kAuthor) == 0);
  CHECK(model.aspect_row(Claim::from_text("x"), AspectKind::kTopic) == 0);
}

TEST_CASE("document gradients match finite differences for every tensor") {
  auto model = toy_model();
  const auto claim = toy_claim();
  const auto doc = toy_doc();
  for (auto kind : kAspectKinds) {
    auto grad = model.zero_gradients();
    document_loss_and_gradient(model, claim, doc, kind, Veracity::kFalse, grad, nullptr, 1.0);
    auto loss = [&] {
      return -std::log(classify_document(model, claim, doc, kind).probabilities[static_cast<int>(Veracity::kFalse)]);
    };
    const auto checks = testsupport::check_gradients(model.mutable_params().tensors(), grad.tensors(), loss);
    for (const auto& c : checks) {
      INFO(to_string(kind), " ", c.name, " |g|=", c.analytic_norm);
      CHECK(c.relative_error < 1e-4);
    }
  }
}

TEST_CASE("dropout changes the training loss but not inference") {
  const auto model = toy_model();
  auto g1 = model.zero_gradients(), g2 = model.zero_gradients();
  nn::Rng r1(5), r2(5);
  const double a = document_loss_and_gradient(model, toy_claim(), toy_doc(), AspectKind::kTopic, Veracity::kTrue, g1, &r1, 0.3);
  const double b = document_loss_and_gradient(model, toy_claim(), toy_doc(), AspectKind::kTopic, Veracity::kTrue, g2, &r2, 0.3);
  const double clean = document_loss_and_gradient(model, toy_claim(), toy_doc(), AspectKind::kTopic, Veracity::kTrue, g2, nullptr, 0.3);
  CHECK(a == b);
  CHECK(a != clean);
}

TEST_CASE("active aspects default to all three kinds") {
  CHECK(active_aspects(Claim::from_text("x")).size() == 3);
  const auto kinds = active_aspects(Claim::from_text("x", {{AspectKind::kDomain, "d"}, {AspectKind::kAuthor, "a"}}));
  REQUIRE(kinds.size() == 2);
  CHECK(kinds[0] == AspectKind::kAuthor);
  CHECK(kinds[1] == AspectKind::kDomain);
}

TEST_CASE("predict averages over aspects and documents") {
  const auto model = toy_model();
  const auto claim = Claim::from_text("Vaccines cause autism", {{AspectKind::kTopic, "health"}});
  const Document d1 = toy_doc(), d2{{"claim", "false"}};

  const auto one = predict(model, claim, {d1});
  REQUIRE(one);
  const auto direct = classify_document(model, claim, d1, AspectKind::kTopic);
  CHECK(one->probabilities == direct.probabilities);
  CHECK(one->score == direct.probabilities[0]);

  const auto two = predict(model, claim, {d1, d2});
  REQUIRE(two);
  const auto p2 = classify_document(model, claim, d2, AspectKind::kTopic).probabilities;
  CHECK(two->probabilities[0] == doctest::Approx((direct.probabilities[0] + p2[0]) / 2).epsilon(1e-15));
  CHECK(two->probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two->documents.size() == 2);
  CHECK(two->aspect_probabilities.size() == 1);

  // No aspects: the three UNK-backed passes are averaged.
  const auto bare = Claim::from_text("Vaccines cause autism");
  const auto all = predict(model, bare, {d1});
  REQUIRE(all);
  Vector mean = Vector::Zero(2);
  for (auto kind : kAspectKinds) mean += classify_document(model, bare, d1, kind).probabilities / 3.0;
  CHECK((all->probabilities - mean).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(all->documents[0].aspect_probabilities.size() == 3);
}

TEST_CASE("predict is invariant to document order") {
  const auto model = toy_model();
  const auto claim = toy_claim();
  std::vector<Document> docs{toy_doc(), {{"claim", "false"}}, {{"studies", "agree", "."}, {"no", "link"}}, {{"autism"}}};
  const auto base = predict(model, claim, docs);
  REQUIRE(base);
  std::sort(docs.begin(), docs.end());
  do {
    const auto r = predict(model, claim, docs);
    REQUIRE(r);
    CHECK(r->probabilities == base->probabilities);
  } while (std::next_permutation(docs.begin(), docs.end()));
}

TEST_CASE("predict without usable evidence reports no result") {
  const auto model = toy_model();
  CHECK_FALSE(predict(model, toy_claim(), {}).has_value());
  CHECK_FALSE(predict(model, toy_claim(), {Document{}, Document{{}}}).has_value());
  // Unusable documents are skipped rather than failing the call.
  const auto r = predict(model, toy_claim(), {Document{}, toy_doc()});
  REQUIRE(r);
  CHECK(r->documents.size() == 1);
  CHECK(r->documents[0].index == 1);
}

TEST_CASE("highlight intensities") {
  Vector beta1(1);
  beta1 << 1.0;
  CHECK(highlight_intensities(beta1, {Vector::Constant(3, 1.0 / 3)})[0] == 1.0);

  Vector beta2(2);
  beta2 << 0.5, 0.5;
  Vector alpha(2);
  alpha << 0.7, 0.3;
  const Vector two = highlight_intensities(beta2, {alpha, alpha});
  CHECK(two[0] == 1.0);
  CHECK(two[1] == 1.0);

  // r = (0.2*0.6, 0.5*0.5, 0.3*0.9) = (0.12, 0.25, 0.27)
  Vector beta3(3);
  beta3 << 0.2, 0.5, 0.3;
  Vector a1(2), a2(2), a3(3);
  a1 << 0.6, 0.4;
  a2 << 0.5, 0.5;
  a3 << 0.05, 0.9, 0.05;
  const Vector three = highlight_intensities(beta3, {a1, a2, a3});
  CHECK(three[0] == doctest::Approx(0.12 / 0.27).epsilon(1e-12));
  CHECK(three[1] == doctest::Approx(0.25 / 0.27).epsilon(1e-12));
  CHECK(three[2] == 1.0);
}

TEST_CASE("extract_evidence keeps document order and word weights") {
  const auto model = toy_model();
  const auto doc = toy_doc();
  const auto out = classify_document(model, toy_claim(), doc, AspectKind::kTopic);
  const auto ev = extract_evidence(out.attention, {"Studies show no.", "Doctors agree."}, doc);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].text == "Studies show no.");
  CHECK(ev[1].index == 1);
  REQUIRE(ev[0].words.size() == 3);
  CHECK(ev[0].words[1].first == "show");
  CHECK(ev[0].words[1].second == out.attention.word_weights[0][1]);
  CHECK(std::max(ev[0].intensity, ev[1].intensity) == 1.0);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const auto model = toy_model();
  const auto path = temp_path("sadhan.ckpt");
  model.save(path);
  auto loaded = SadhanModel::load(path);
  CHECK(loaded.dims() == model.dims());
  auto a = model;
  const auto ta = a.mutable_params().tensors();
  const auto tb = loaded.mutable_params().tensors();
  REQUIRE(ta.size() == tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    INFO(ta[i].name);
    CHECK(std::equal(ta[i].values.begin(), ta[i].values.end(), tb[i].values.begin()));
  }
  CHECK(loaded.embeddings().weights() == model.embeddings().weights());
  CHECK(loaded.aspect_values(AspectKind::kAuthor) == model.aspect_values(AspectKind::kAuthor));
  CHECK_NOTHROW(SadhanModel::load(path, kSmall));

  SadhanDims other = kSmall;
  other.hidden = 7;
  CHECK_THROWS_WITH_AS(SadhanModel::load(path, other), doctest::Contains("hidden"), LoadError);

  // Truncation is reported, wherever the cut falls.
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (std::size_t cut : {bytes.size() / 2, bytes.size() - 3, std::size_t{10}}) {
    const auto trunc = temp_path("sadhan_trunc.ckpt");
    std::ofstream(trunc, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(cut));
    CHECK_THROWS_AS(SadhanModel::load(trunc), LoadError);
  }
}

TEST_CASE("a checkpoint of a different kind is rejected") {
  const auto path = temp_path("not_sadhan.ckpt");
  std::ofstream(path, std::ios::binary) << "garbage";
  CHECK_THROWS_AS(SadhanModel::load(path), LoadError);
}

TEST_CASE("training is deterministic and needs both labels") {
  const auto data = toy_dataset(6, 2);
  auto vocab = std::make_shared<const text::Vocabulary>(dataset_vocabulary(data));
  auto table = std::make_shared<const text::EmbeddingTable>(text::random_embeddings(vocab, kSmall.embed_dim, 1, 0.5));
  nn::TrainConfig config;
  config.epochs = 3;
  config.batch_size = 4;
  config.optimizer = nn::OptimizerKind::adam;
  const auto a = train_sadhan(data, config, kSmall, table);
  const auto b = train_sadhan(data, config, kSmall, table);
  REQUIRE(a.history.size() == 4);
  for (std::size_t e = 0; e < a.history.size(); ++e) CHECK(a.history[e].train_loss == b.history[e].train_loss);

  config.parallel = false;
  const auto c = train_sadhan(data, config, kSmall, table);
  for (std::size_t e = 0; e < a.history.size(); ++e) CHECK(a.history[e].train_loss == c.history[e].train_loss);

  std::vector<Example> single;
  for (const auto& e : data)
    if (e.label == Veracity::kTrue) single.push_back(e);
  CHECK_THROWS_AS(train_sadhan(single, config, kSmall, table), TrainingError);
}

TEST_CASE("example gradients average over aspect and document passes") {
  const auto data = toy_dataset(2, 4);
  auto vocab = std::make_shared<const text::Vocabulary>(dataset_vocabulary(data));
  auto table = std::make_shared<const text::EmbeddingTable>(text::random_embeddings(vocab, kSmall.embed_dim, 1, 0.8));
  auto model = SadhanModel::create(kSmall, table, collect_aspect_values(data), 5);
  auto grad = model.zero_gradients();
  example_loss_and_gradient(model, data[1], grad, nullptr, 1.0);
  const auto checks = testsupport::check_gradients(model.mutable_params().tensors(), grad.tensors(),
                                                   [&] { return example_loss(model, data[1]); });
  for (const auto& c : checks) {
    INFO(c.name);
    CHECK(c.relative_error < 1e-4);
  }
}

TEST_CASE("dataset directories round trip") {
  const auto data = toy_dataset(4, 9);
  const auto dir = temp_path("dataset");
  fs::remove_all(dir);
  write_dataset(dir, data);
  const auto back = load_dataset(dir);
  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back[i].id == data[i].id);
    CHECK(back[i].claim.tokens == data[i].claim.tokens);
    CHECK(back[i].claim.aspects == data[i].claim.aspects);
    CHECK(back[i].label == data[i].label);
    CHECK(documents_of(back[i]) == documents_of(data[i]));
  }
  std::ofstream(dir / data[0].id / "label") << "maybe\n";
  CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("label"), LoadError);
}

TEST_CASE("evaluation metrics of a trained model are well formed") {
  const auto data = toy_dataset(6, 3);
  auto vocab = std::make_shared<const text::Vocabulary>(dataset_vocabulary(data));
  auto table = std::make_shared<const text::EmbeddingTable>(text::random_embeddings(vocab, kSmall.embed_dim, 1, 0.5));
  const auto model = SadhanModel::create(kSmall, table, collect_aspect_values(data), 1);
  const auto m = evaluate_sadhan(model, data);
  CHECK(m.auc >= 0.0);
  CHECK(m.auc <= 1.0);
  CHECK_THROWS(evaluate_sadhan(model, {}));
}
