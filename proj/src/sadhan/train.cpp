#include "factcheck/sadhan/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "factcheck/error.hpp"
#include "factcheck/nn/batch.hpp"
#include "factcheck/nn/optimizer.hpp"
#include "factcheck/text/sentence.hpp"

namespace factcheck::sadhan {
namespace fs = std::filesystem;
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

EvidenceDocument make_evidence(std::string name, const std::string& body) {
  EvidenceDocument doc;
  doc.name = std::move(name);
  for (auto& s : text::segment_sentences(body)) doc.sentences.push_back(std::move(s.text));
  doc.tokens = make_document(doc.sentences);
  return doc;
}

bool usable(const Example& e) {
  return std::any_of(e.evidence.begin(), e.evidence.end(), [](const EvidenceDocument& d) {
    return std::any_of(d.tokens.begin(), d.tokens.end(), [](const auto& s) { return !s.empty(); });
  });
}

}  // namespace

std::vector<Document> documents_of(const Example& example) {
  std::vector<Document> docs;
  docs.reserve(example.evidence.size());
  for (const auto& d : example.evidence) docs.push_back(d.tokens);
  return docs;
}

std::vector<EvidenceDocument> load_evidence_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LoadError("missing evidence directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<EvidenceDocument> docs;
  for (const auto& f : files) docs.push_back(make_evidence(f.filename().string(), read_file(f)));
  return docs;
}

std::vector<Example> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LoadError("dataset directory not found: " + dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<Example> out;
  for (const auto& d : dirs) {
    Example e;
    e.id = d.filename().string();
    std::map<AspectKind, std::string> aspects;
    if (fs::exists(d / "aspects")) {
      std::istringstream lines(read_file(d / "aspects"));
      std::string line;
      for (std::size_t n = 1; std::getline(lines, line); ++n) {
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
          throw LoadError((d / "aspects").string() + " line " + std::to_string(n) + ": expected key=value");
        try {
          aspects[parse_aspect_kind(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
        } catch (const std::invalid_argument& err) {
          throw LoadError((d / "aspects").string() + " line " + std::to_string(n) + ": " + err.what());
        }
      }
    }
    e.claim = Claim::from_text(trim(read_file(d / "claim.txt")), std::move(aspects));
    if (e.claim.tokens.empty()) throw LoadError((d / "claim.txt").string() + ": empty claim");
    try {
      e.label = parse_veracity(trim(read_file(d / "label")));
    } catch (const std::invalid_argument& err) {
      throw LoadError((d / "label").string() + ": " + err.what());
    }
    e.evidence = load_evidence_dir(d / "evidence");
    out.push_back(std::move(e));
  }
  return out;
}

void write_dataset(const fs::path& dir, const std::vector<Example>& examples) {
  fs::create_directories(dir);
  for (const auto& e : examples) {
    const auto d = dir / e.id;
    fs::create_directories(d / "evidence");
    write_file(d / "claim.txt", e.claim.text + "\n");
    write_file(d / "label", std::string(to_string(e.label)) + "\n");
    std::string aspects;
    for (const auto& [kind, value] : e.claim.aspects) aspects += std::string(to_string(kind)) + "=" + value + "\n";
    write_file(d / "aspects", aspects);
    for (const auto& doc : e.evidence) {
      std::string body;
      for (const auto& s : doc.sentences) body += (body.empty() ? "" : " ") + s;
      write_file(d / "evidence" / doc.name, body + "\n");
    }
  }
}

std::vector<Example> toy_dataset(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> subjects = {"the senator", "the governor", "the mayor", "the minister"};
  static const std::vector<std::string> topics = {"taxes", "vaccines", "jobs", "climate"};
  static const std::vector<std::string> verbs = {"doubled", "cut", "raised", "halved"};
  static const std::vector<std::string> support = {"Records confirmed the figure is accurate.",
                                                   "Independent auditors verified the statement.",
                                                   "Official data supports the number."};
  static const std::vector<std::string> refute = {"Records show the figure is fabricated.",
                                                  "Independent auditors debunked the statement.",
                                                  "Official data contradicts the hoax."};
  static const std::vector<std::string> authors = {"alice", "bob", "carol"};
  static const std::vector<std::string> domains = {"news.example", "blog.example"};

  nn::Rng rng(seed);
  auto pick = [&](const std::vector<std::string>& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    e.id = "example_" + std::string(i < 10 ? "00" : i < 100 ? "0" : "") + std::to_string(i);
    e.label = i % 2 == 0 ? Veracity::kTrue : Veracity::kFalse;
    const auto topic = topics[i % topics.size()];
    std::map<AspectKind, std::string> aspects{{AspectKind::kTopic, topic}};
    if (i % 3 != 2) aspects[AspectKind::kAuthor] = authors[i % authors.size()];
    if (i % 4 == 1) aspects[AspectKind::kDomain] = domains[i % domains.size()];
    e.claim = Claim::from_text(pick(subjects) + " " + pick(verbs) + " spending on " + topic + ".", std::move(aspects));
    const auto& pool = e.label == Veracity::kTrue ? support : refute;
    for (std::size_t k = 0; k < 2; ++k) {
      const std::string body = "The claim about " + topic + " was reviewed. " + pool[(i + k) % pool.size()];
      e.evidence.push_back(make_evidence("doc" + std::to_string(k) + ".txt", body));
    }
    out.push_back(std::move(e));
  }
  return out;
}

text::Vocabulary dataset_vocabulary(const std::vector<Example>& examples) {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& e : examples) {
    corpus.push_back(e.claim.tokens);
    for (const auto& d : e.evidence) corpus.insert(corpus.end(), d.tokens.begin(), d.tokens.end());
  }
  return text::Vocabulary::build(corpus, 1);
}

AspectValues collect_aspect_values(const std::vector<Example>& examples) {
  std::array<std::set<std::string>, 3> sets;
  for (const auto& e : examples)
    for (const auto& [kind, value] : e.claim.aspects) sets[static_cast<int>(kind)].insert(value);
  AspectValues values;
  for (std::size_t k = 0; k < 3; ++k) values[k].assign(sets[k].begin(), sets[k].end());
  return values;
}

double example_loss_and_gradient(const SadhanModel& model, const Example& example, SadhanParams& grad,
                                 nn::Rng* dropout_rng, double keep_prob) {
  const auto aspects = active_aspects(example.claim);
  double loss = 0.0;
  std::size_t count = 0;
  for (auto kind : aspects)
    for (const auto& doc : example.evidence) {
      if (std::none_of(doc.tokens.begin(), doc.tokens.end(), [](const auto& s) { return !s.empty(); })) continue;
      loss += document_loss_and_gradient(model, example.claim, doc.tokens, kind, example.label, grad, dropout_rng, keep_prob);
      ++count;
    }
  if (count == 0) throw TrainingError("example '" + example.id + "' has no usable evidence");
  nn::scale(grad.tensors(), 1.0 / static_cast<double>(count));
  return loss / static_cast<double>(count);
}

double example_loss(const SadhanModel& model, const Example& example) {
  double loss = 0.0;
  std::size_t count = 0;
  for (auto kind : active_aspects(example.claim))
    for (const auto& doc : example.evidence) {
      if (std::none_of(doc.tokens.begin(), doc.tokens.end(), [](const auto& s) { return !s.empty(); })) continue;
      loss -= std::log(classify_document(model, example.claim, doc.tokens, kind).probabilities[static_cast<int>(example.label)]);
      ++count;
    }
  if (count == 0) throw TrainingError("example '" + example.id + "' has no usable evidence");
  return loss / static_cast<double>(count);
}

std::vector<double> false_probabilities(const SadhanModel& model, const std::vector<Example>& data) {
  if (data.empty()) throw std::invalid_argument("evaluation dataset is empty");
  std::vector<double> p(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto result = predict(model, data[i].claim, documents_of(data[i]));
    if (!result) throw ModelError("example '" + data[i].id + "' has no usable evidence");
    p[i] = result->probabilities[static_cast<int>(Veracity::kFalse)];
  }
  return p;
}

metrics::CredibilityMetrics evaluate_sadhan(const SadhanModel& model, const std::vector<Example>& data) {
  const auto p = false_probabilities(model, data);
  std::vector<int> gold(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) gold[i] = static_cast<int>(data[i].label);
  return metrics::credibility_metrics(p, gold);
}

SadhanTrainResult train_sadhan(const std::vector<Example>& data, const nn::TrainConfig& config,
                               const SadhanDims& dims, std::shared_ptr<const text::EmbeddingTable> embeddings,
                               const std::vector<Example>* validation) {
  config.validate();
  bool has[2] = {false, false};
  for (const auto& e : data) {
    if (!usable(e)) throw TrainingError("example '" + e.id + "' has no usable evidence");
    has[static_cast<int>(e.label)] = true;
  }
  if (!has[0] || !has[1]) throw TrainingError("training data needs both true and false examples");
  const auto& val = validation && !validation->empty() ? *validation : data;

  SadhanModel model = SadhanModel::create(dims, std::move(embeddings), collect_aspect_values(data), config.seed);
  auto make_zero = [&] { return model.zero_gradients(); };
  auto full_loss = [&] {
    double loss = 0.0;
    for (const auto& e : data) loss += example_loss(model, e);
    return loss / static_cast<double>(data.size());
  };

  SadhanTrainResult result{model, {}, 0};
  result.history.push_back({0, full_loss(), evaluate_sadhan(model, val).macro_f1});
  double best = -1.0;  // epoch 0 is reported but never selected

  nn::Optimizer optimizer(config.optimizer, config.learning_rate);
  std::vector<std::size_t> order(data.size());
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    nn::Rng shuffle_rng(nn::mix_seed(config.seed, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - begin);
      SadhanParams grad = make_zero();
      nn::accumulate_gradients(
          n, grad, make_zero,
          [&](std::size_t k, SadhanParams& g) {
            const std::size_t item = order[begin + k];
            // Per-item stream: dropout masks do not depend on thread layout.
            nn::Rng dropout(nn::mix_seed(config.seed, epoch, item + 1));
            return example_loss_and_gradient(model, data[item], g, config.keep_prob < 1.0 ? &dropout : nullptr,
                                             config.keep_prob);
          },
          config.parallel);
      const auto grads = grad.tensors();
      nn::scale(grads, 1.0 / static_cast<double>(n));
      optimizer.step(model.mutable_params().tensors(), grads);
    }
    if (!nn::all_finite(model.mutable_params().tensors()))
      throw TrainingError("parameters diverged at epoch " + std::to_string(epoch));
    const double score = evaluate_sadhan(model, val).macro_f1;
    result.history.push_back({epoch, full_loss(), score});
    if (score > best) {
      best = score;
      result.model = model;
      result.best_epoch = epoch;
    }
  }
  return result;
}

SadhanCrossValidation cross_validate_sadhan(const std::vector<Example>& data, std::size_t k,
                                            const nn::TrainConfig& config, const SadhanDims& dims,
                                            std::shared_ptr<const text::EmbeddingTable> embeddings) {
  const auto folds = metrics::kfold_split(data.size(), k, config.seed);
  SadhanCrossValidation cv;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<Example> train, test;
    for (auto i : metrics::training_indices(folds, f, data.size())) train.push_back(data[i]);
    for (auto i : folds[f]) test.push_back(data[i]);
    auto trained = train_sadhan(train, config, dims, embeddings);
    cv.folds.push_back(evaluate_sadhan(trained.model, test));
  }
  std::size_t auc_count = 0;
  for (const auto& m : cv.folds) {
    cv.mean.true_accuracy += m.true_accuracy / static_cast<double>(k);
    cv.mean.false_accuracy += m.false_accuracy / static_cast<double>(k);
    cv.mean.macro_f1 += m.macro_f1 / static_cast<double>(k);
    if (!std::isnan(m.auc)) {
      cv.mean.auc += m.auc;
      ++auc_count;
    }
  }
  cv.mean.auc = auc_count ? cv.mean.auc / static_cast<double>(auc_count) : std::nan("");
  return cv;
}

}  // namespace factcheck::sadhan
