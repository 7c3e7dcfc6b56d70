#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "factcheck/retrieval/extract.hpp"
#include "factcheck/worthiness/model.hpp"

using namespace factcheck;

namespace {

int train(const std::string& data_path, const std::string& out, const std::optional<std::string>& vectors,
          std::size_t dim, std::size_t hidden, const nn::TrainConfig& config, std::size_t folds) {
  std::ifstream in(data_path);
  if (!in) throw LoadError("cannot read '" + data_path + "'");
  const auto data = worthiness::read_tsv(in);
  std::vector<std::vector<std::string>> corpus;
  for (const auto& s : data) corpus.push_back(text::tokenize(s.text));
  auto vocab = std::make_shared<const text::Vocabulary>(text::Vocabulary::build(corpus, 1));
  auto table = cli::vocabulary_table(vocab, dim, vectors, config.seed, 0.5);

  if (folds > 1) {
    const auto cv = worthiness::cross_validate_worthiness(data, folds, config, table, hidden);
    for (std::size_t f = 0; f < cv.folds.size(); ++f)
      std::cout << "fold " << f + 1 << ": precision " << cv.folds[f].precision << " recall " << cv.folds[f].recall
                << " micro-F1 " << cv.folds[f].micro_f1 << '\n';
    std::cout << "mean: precision " << cv.mean.precision << " recall " << cv.mean.recall << " micro-F1 "
              << cv.mean.micro_f1 << '\n';
  }
  const auto result = worthiness::train_worthiness(data, config, table, hidden);
  for (const auto& e : result.history)
    std::cerr << "epoch " << e.epoch << " loss " << e.train_loss << " micro-F1 " << e.validation_score << '\n';
  result.model.save(out);
  const auto m = worthiness::evaluate_worthiness(result.model, data);
  std::cout << "saved " << out << " (best epoch " << result.best_epoch << ", training micro-F1 " << m.micro_f1
            << ")\n";
  return 0;
}

int score(const std::string& model_path, const std::string& text_arg, double threshold, std::size_t top_k,
          bool as_json) {
  const auto model = worthiness::WorthinessModel::load(model_path);
  retrieval::SearchResult page;
  page.raw_html = cli::text_or_file(text_arg);
  const auto article = retrieval::extract_article(page);
  const auto ranked = worthiness::rank_claims(model, article, threshold, top_k);
  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : ranked)
      out.push_back({{"index", s.sentence.index}, {"sentence", s.sentence.text}, {"score", s.score}});
    std::cout << out.dump(2) << '\n';
  } else {
    for (const auto& s : ranked)
      std::cout << std::fixed << std::setprecision(4) << s.score << '\t' << s.sentence.text << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Claim check-worthiness: train, score and generate data"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train", "train a model on sentence<TAB>label data");
  std::string data_path, out_path;
  std::optional<std::string> vectors;
  std::size_t dim = 16, hidden = worthiness::kDefaultHidden, folds = 0;
  nn::TrainConfig config;
  std::string optimizer = "sgd";
  train_cmd->add_option("--data", data_path, "TSV training data")->required();
  train_cmd->add_option("--out", out_path, "model file to write")->required();
  train_cmd->add_option("--embeddings", vectors, "word vectors (token v1 ... vd per line)");
  train_cmd->add_option("--dim", dim, "embedding dimension")->capture_default_str();
  train_cmd->add_option("--hidden", hidden, "LSTM hidden size")->capture_default_str();
  train_cmd->add_option("--epochs", config.epochs)->capture_default_str();
  train_cmd->add_option("--lr", config.learning_rate)->capture_default_str();
  train_cmd->add_option("--batch-size", config.batch_size)->capture_default_str();
  train_cmd->add_option("--seed", config.seed)->capture_default_str();
  train_cmd->add_option("--optimizer", optimizer, "sgd or adam")->capture_default_str();
  train_cmd->add_option("--folds", folds, "also report k-fold cross-validation");

  auto* score_cmd = app.add_subcommand("score", "rank the check-worthy sentences of a text");
  std::string model_path, text_arg;
  double threshold = 0.5;
  std::size_t top_k = 5;
  bool as_json = false;
  score_cmd->add_option("--model", model_path)->required();
  score_cmd->add_option("--text", text_arg, "text or a file holding it")->required();
  score_cmd->add_option("--threshold", threshold)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  score_cmd->add_option("--top-k", top_k)->capture_default_str()->check(CLI::PositiveNumber);
  score_cmd->add_flag("--json", as_json);

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic separable TSV corpus");
  std::size_t n = 200;
  std::uint64_t synth_seed = 1;
  synth_cmd->add_option("--n", n)->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed)->capture_default_str();
  synth_cmd->add_option("--out", out_path, "file to write (stdout when absent)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train_cmd) {
      config.optimizer = nn::parse_optimizer(optimizer);
      config.validate();
      return train(data_path, out_path, vectors, dim, hidden, config, folds);
    }
    if (*score_cmd) return score(model_path, text_arg, threshold, top_k, as_json);
    const auto corpus = worthiness::synthetic_corpus(n, synth_seed);
    if (out_path.empty()) {
      worthiness::write_tsv(std::cout, corpus);
    } else {
      std::ofstream out(out_path);
      worthiness::write_tsv(out, corpus);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
