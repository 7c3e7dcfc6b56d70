#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace factcheck::metrics {

// Precision/recall of the positive class (label 0) and micro-F1 over both
// classes. Undefined ratios (no positive predictions, no positive gold) are
// reported as 0.
struct ClaimMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double micro_f1 = 0.0;
};

// Labels are class indices in {0, 1}.
ClaimMetrics claim_metrics(std::span<const int> predicted, std::span<const int> gold);

// Class 0 = true, class 1 = false.
struct CredibilityMetrics {
  double true_accuracy = 0.0;   // accuracy restricted to true-labelled items
  double false_accuracy = 0.0;  // accuracy restricted to false-labelled items
  double macro_f1 = 0.0;        // mean of per-class F1
  double auc = 0.0;             // ROC AUC of P(false) against the false label
};

// Predicted class is "false" when p_false > 0.5.
CredibilityMetrics credibility_metrics(std::span<const double> p_false, std::span<const int> gold);

// Mann-Whitney estimate with mid-ranks for ties. NaN when either class is
// missing.
double roc_auc(std::span<const double> scores, std::span<const bool> positive);

// Seeded k-fold split of [0, n): returns the held-out indices of each fold,
// each sorted ascending. Throws for k < 2 or k > n.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// Complement of fold `f` within [0, n).
std::vector<std::size_t> training_indices(const std::vector<std::vector<std::size_t>>& folds, std::size_t f,
                                          std::size_t n);

}  // namespace factcheck::metrics
