#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "factcheck/metrics.hpp"

using namespace factcheck::metrics;

namespace {

// Fraction of (positive, negative) pairs ordered correctly, ties count half.
double pairwise_auc(const std::vector<double>& s, const std::vector<bool>& pos) {
  double good = 0.0, total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (pos[i] && !pos[j]) {
        total += 1.0;
        good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return good / total;
}

}  // namespace

TEST_CASE("claim metrics") {
  const std::vector<int> all_claim(6, 0), all_non(6, 1);
  auto m = claim_metrics(all_claim, all_claim);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.micro_f1 == 1.0);
  m = claim_metrics(all_non, all_claim);
  CHECK(m.recall == 0.0);
  CHECK(m.precision == 0.0);

  // tp=2 fp=1 fn=1 tn=2
  const std::vector<int> pred{0, 0, 0, 1, 1, 1}, gold{0, 0, 1, 0, 1, 1};
  m = claim_metrics(pred, gold);
  CHECK(m.precision == doctest::Approx(2.0 / 3));
  CHECK(m.recall == doctest::Approx(2.0 / 3));
  CHECK(m.micro_f1 == doctest::Approx(4.0 / 6));
  CHECK_THROWS(claim_metrics(std::vector<int>{}, std::vector<int>{}));
  CHECK_THROWS(claim_metrics(pred, std::vector<int>{0}));
}

TEST_CASE("credibility metrics") {
  const std::vector<int> gold{0, 0, 1, 1};
  const std::vector<double> perfect{0.1, 0.2, 0.9, 0.8};
  auto m = credibility_metrics(perfect, gold);
  CHECK(m.true_accuracy == 1.0);
  CHECK(m.false_accuracy == 1.0);
  CHECK(m.macro_f1 == 1.0);
  CHECK(m.auc == 1.0);

  const std::vector<double> constant(4, 0.5);
  m = credibility_metrics(constant, gold);
  CHECK(m.auc == 0.5);
  CHECK(m.true_accuracy == 1.0);  // 0.5 is not above the cut, so "true"
  CHECK(m.false_accuracy == 0.0);
}

TEST_CASE("auc agrees with pairwise counting") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coarse(0, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(30);
    std::vector<bool> pos(30);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = coarse(rng) / 5.0;  // plenty of ties
      pos[i] = (i % 3) == 0;
    }
    const auto flags = std::make_unique<bool[]>(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) flags[i] = pos[i];
    CHECK(roc_auc(s, std::span<const bool>(flags.get(), pos.size())) == doctest::Approx(pairwise_auc(s, pos)).epsilon(1e-12));
  }
  const bool one_class[] = {true, true};
  const double sc[] = {0.1, 0.2};
  CHECK(std::isnan(roc_auc(sc, one_class)));
}

TEST_CASE("k-fold split partitions the indices") {
  const auto folds = kfold_split(23, 5, 7);
  REQUIRE(folds.size() == 5);
  std::vector<std::size_t> all;
  for (const auto& f : folds) {
    CHECK((f.size() == 4 || f.size() == 5));
    CHECK(std::is_sorted(f.begin(), f.end()));
    all.insert(all.end(), f.begin(), f.end());
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  CHECK(kfold_split(23, 5, 7) == folds);
  CHECK(kfold_split(23, 5, 8) != folds);
  CHECK(training_indices(folds, 2, 23).size() == 23 - folds[2].size());
  CHECK_THROWS(kfold_split(3, 5, 1));
  CHECK_THROWS(kfold_split(10, 1, 1));
}
