#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "factcheck/sadhan/train.hpp"

using namespace factcheck;
using nlohmann::json;

namespace {

struct RunConfig {
  nn::TrainConfig train;
  sadhan::SadhanDims dims;
  std::optional<std::string> embeddings;
};

// JSON file: training keys (learning_rate, keep_prob, epochs, batch_size,
// seed, optimizer, parallel), model sizes (embed_dim, hidden, aspect_dim,
// attention_dim) and an optional "embeddings" vector file.
RunConfig read_config(const std::optional<std::string>& path) {
  RunConfig c;
  if (!path) return c;
  json j;
  try {
    j = json::parse(cli::slurp(*path));
  } catch (const json::exception& e) {
    throw LoadError("config '" + *path + "': " + e.what());
  }
  c.train = cli::train_config_from_json(j);
  c.dims.embed_dim = j.value("embed_dim", c.dims.embed_dim);
  c.dims.hidden = j.value("hidden", c.dims.hidden);
  c.dims.aspect_dim = j.value("aspect_dim", c.dims.aspect_dim);
  c.dims.attention_dim = j.value("attention_dim", c.dims.attention_dim);
  if (j.contains("embeddings")) c.embeddings = j["embeddings"].get<std::string>();
  return c;
}

void print_metrics(const std::string& label, const metrics::CredibilityMetrics& m) {
  std::cout << label << ": true acc " << m.true_accuracy << "  false acc " << m.false_accuracy << "  macro-F1 "
            << m.macro_f1 << "  AUC " << m.auc << '\n';
}

int train(const std::string& data_dir, const std::optional<std::string>& config_path, const std::string& out) {
  const auto config = read_config(config_path);
  const auto data = sadhan::load_dataset(data_dir);
  auto vocab = std::make_shared<const text::Vocabulary>(sadhan::dataset_vocabulary(data));
  auto table = cli::vocabulary_table(vocab, config.dims.embed_dim, config.embeddings, config.train.seed,
                                     text::kOovInitBound);
  const auto result = sadhan::train_sadhan(data, config.train, config.dims, table);
  for (const auto& e : result.history)
    std::cerr << "epoch " << e.epoch << " loss " << e.train_loss << " macro-F1 " << e.validation_score << '\n';
  result.model.save(out);
  std::cout << "saved " << out << " (best epoch " << result.best_epoch << ")\n";
  print_metrics("training", sadhan::evaluate_sadhan(result.model, data));
  return 0;
}

int eval(const std::string& ckpt, const std::string& data_dir, std::size_t folds,
         const std::optional<std::string>& config_path) {
  const auto model = sadhan::SadhanModel::load(ckpt);
  const auto data = sadhan::load_dataset(data_dir);
  if (folds <= 1) {
    print_metrics("checkpoint", sadhan::evaluate_sadhan(model, data));
    return 0;
  }
  // Cross-validation retrains from scratch on each fold with the
  // checkpoint's sizes and word vectors.
  const auto config = read_config(config_path);
  const auto cv = sadhan::cross_validate_sadhan(data, folds, config.train, model.dims(), model.embeddings_ptr());
  for (std::size_t f = 0; f < cv.folds.size(); ++f) print_metrics("fold " + std::to_string(f + 1), cv.folds[f]);
  print_metrics("mean", cv.mean);
  return 0;
}

json probability_json(const Vector& p) { return {{"true", p(0)}, {"false", p(1)}}; }

int predict(const std::string& ckpt, const std::string& claim_text, const std::string& evidence_dir,
            const std::vector<std::string>& aspect_args, bool as_json) {
  const auto model = sadhan::SadhanModel::load(ckpt);
  std::map<sadhan::AspectKind, std::string> aspects;
  for (const auto& a : aspect_args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--aspect expects kind=value, got '" + a + "'");
    aspects[sadhan::parse_aspect_kind(a.substr(0, eq))] = a.substr(eq + 1);
  }
  const auto claim = sadhan::Claim::from_text(claim_text, aspects);
  const auto evidence = sadhan::load_evidence_dir(evidence_dir);
  std::vector<sadhan::Document> docs;
  for (const auto& e : evidence) docs.push_back(e.tokens);
  const auto result = sadhan::predict(model, claim, docs);

  json out = {{"claim", claim_text}};
  if (!result) {
    out["verdict"] = "unverifiable";
  } else {
    out["verdict"] = result->score >= 0.5 ? "true" : "false";
    out["score"] = result->score;
    out["probabilities"] = probability_json(result->probabilities);
    json documents = json::array();
    for (const auto& d : result->documents) {
      json sentences = json::array();
      for (const auto& s : sadhan::extract_evidence(d.attention, evidence[d.index].sentences, docs[d.index])) {
        json words = json::array();
        for (const auto& [token, weight] : s.words) words.push_back({{"token", token}, {"weight", weight}});
        sentences.push_back({{"index", s.index}, {"text", s.text}, {"intensity", s.intensity}, {"words", words}});
      }
      documents.push_back({{"name", evidence[d.index].name},
                           {"probabilities", probability_json(d.probabilities)},
                           {"sentences", sentences}});
    }
    out["documents"] = documents;
  }
  if (as_json) {
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  std::cout << "verdict: " << out["verdict"].get<std::string>();
  if (result) std::cout << "  score " << std::fixed << std::setprecision(4) << result->score;
  std::cout << '\n';
  if (result)
    for (const auto& d : out["documents"])
      for (const auto& s : d["sentences"])
        std::cout << "  [" << d["name"].get<std::string>() << "] " << std::setprecision(2)
                  << s["intensity"].get<double>() << "  " << s["text"].get<std::string>() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aspect-conditioned hierarchical attention credibility model"};
  app.require_subcommand(1);
  std::string data_dir, out, ckpt;
  std::optional<std::string> config_path;

  auto* train_cmd = app.add_subcommand("train", "train on a dataset directory");
  train_cmd->add_option("--data", data_dir)->required();
  train_cmd->add_option("--config", config_path, "JSON hyper-parameter file");
  train_cmd->add_option("--out", out)->required();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint, or cross-validate with --folds");
  std::size_t folds = 0;
  eval_cmd->add_option("--ckpt", ckpt)->required();
  eval_cmd->add_option("--data", data_dir)->required();
  eval_cmd->add_option("--folds", folds, "retrain and evaluate k folds");
  eval_cmd->add_option("--config", config_path, "training hyper-parameters for --folds");

  auto* predict_cmd = app.add_subcommand("predict", "score one claim against an evidence directory");
  std::string claim, evidence_dir;
  std::vector<std::string> aspect_args;
  bool as_json = false;
  predict_cmd->add_option("--ckpt", ckpt)->required();
  predict_cmd->add_option("--claim", claim)->required();
  predict_cmd->add_option("--evidence", evidence_dir, "directory of .txt documents")->required();
  predict_cmd->add_option("--aspect", aspect_args, "kind=value, kind in author/topic/domain");
  predict_cmd->add_flag("--json", as_json);

  auto* toy_cmd = app.add_subcommand("toy", "write the small separable toy dataset");
  std::size_t n = 8;
  std::uint64_t seed = 1;
  toy_cmd->add_option("--n", n)->capture_default_str();
  toy_cmd->add_option("--seed", seed)->capture_default_str();
  toy_cmd->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train_cmd) return train(data_dir, config_path, out);
    if (*eval_cmd) return eval(ckpt, data_dir, folds, config_path);
    if (*predict_cmd) return predict(ckpt, claim, evidence_dir, aspect_args, as_json);
    sadhan::write_dataset(out, sadhan::toy_dataset(n, seed));
    std::cout << "wrote " << n << " examples to " << out << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
