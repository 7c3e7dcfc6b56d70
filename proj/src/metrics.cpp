#include "factcheck/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>

namespace factcheck::metrics {
namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

struct Confusion {
  // counts[gold][predicted]
  double counts[2][2] = {{0, 0}, {0, 0}};

  Confusion(std::span<const int> predicted, std::span<const int> gold) {
    if (predicted.size() != gold.size()) throw std::invalid_argument("metrics: length mismatch");
    if (gold.empty()) throw std::invalid_argument("metrics: empty dataset");
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if ((gold[i] != 0 && gold[i] != 1) || (predicted[i] != 0 && predicted[i] != 1))
        throw std::invalid_argument("metrics: labels must be 0 or 1");
      counts[gold[i]][predicted[i]] += 1.0;
    }
  }

  double precision(int c) const { return ratio(counts[c][c], counts[0][c] + counts[1][c]); }
  double recall(int c) const { return ratio(counts[c][c], counts[c][0] + counts[c][1]); }
};

}  // namespace

ClaimMetrics claim_metrics(std::span<const int> predicted, std::span<const int> gold) {
  const Confusion m(predicted, gold);
  ClaimMetrics out;
  out.precision = m.precision(0);
  out.recall = m.recall(0);
  // Micro-averaging over both classes of a single-label problem pools every
  // decision: TP = diagonal, FP = FN = off-diagonal.
  const double tp = m.counts[0][0] + m.counts[1][1];
  const double off = m.counts[0][1] + m.counts[1][0];
  out.micro_f1 = f1(ratio(tp, tp + off), ratio(tp, tp + off));
  return out;
}

CredibilityMetrics credibility_metrics(std::span<const double> p_false, std::span<const int> gold) {
  std::vector<int> predicted(p_false.size());
  for (std::size_t i = 0; i < p_false.size(); ++i) predicted[i] = p_false[i] > 0.5 ? 1 : 0;
  const Confusion m(predicted, gold);
  CredibilityMetrics out;
  out.true_accuracy = m.recall(0);
  out.false_accuracy = m.recall(1);
  out.macro_f1 = 0.5 * (f1(m.precision(0), m.recall(0)) + f1(m.precision(1), m.recall(1)));
  auto positive = std::make_unique<bool[]>(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) positive[i] = gold[i] == 1;
  out.auc = roc_auc(p_false, std::span<const bool>(positive.get(), gold.size()));
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) throw std::invalid_argument("roc_auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0, n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k)
      if (positive[order[k]]) {
        rank_sum += mid_rank;
        n_pos += 1.0;
      }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw std::invalid_argument("kfold_split: need 2 <= k <= n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::size_t> training_indices(const std::vector<std::vector<std::size_t>>& folds, std::size_t f,
                                          std::size_t n) {
  std::vector<bool> held(n, false);
  for (auto i : folds.at(f)) held.at(i) = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!held[i]) out.push_back(i);
  return out;
}

}  // namespace factcheck::metrics
