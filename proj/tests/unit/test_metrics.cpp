#include <gtest/gtest.h>

#include <random>

#include "decode/metrics.hpp"

using namespace decode;

namespace {

// Normalized Mann-Whitney U with ties counted as one half.
double mann_whitney(const std::vector<double>& s, const std::vector<int>& y) {
  double u = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    ++pos;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      u += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  for (int v : y) neg += v == 0;
  return u / (pos * neg);
}

}  // namespace

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(accuracy(std::vector{1, 0, 1}, std::vector{1, 0, 0}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(accuracy(std::vector{1, 0}, std::vector{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(std::vector{0, 1}, std::vector{1, 0}), 0.0);
  EXPECT_THROW(accuracy(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
}

TEST(F1, Examples) {
  // TP=2, FP=1, FN=1.
  EXPECT_NEAR(f1_binary(std::vector{1, 1, 1, 0, 0}, std::vector{1, 1, 0, 1, 0}, 1), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(f1_binary(std::vector{0, 0}, std::vector{1, 0}, 1), 0.0);
  EXPECT_DOUBLE_EQ(f1_binary(std::vector{1, 0}, std::vector{1, 0}, 1), 1.0);
  EXPECT_THROW(f1_binary(std::vector<int>{}, std::vector<int>{}, 1), std::invalid_argument);
}

TEST(MacroF1, Examples) {
  EXPECT_DOUBLE_EQ(macro_f1(std::vector{0, 1}, std::vector{0, 1}, 2), 1.0);
  // Class 0 perfect, class 1 never predicted and absent: {1.0, 0.0}.
  EXPECT_DOUBLE_EQ(macro_f1(std::vector{0, 0}, std::vector{0, 0}, 2), 0.5);
}

TEST(MacroF1, SevenClassHandTally) {
  // Confusion rows (true) x cols (pred), tallied by hand:
  //   c0: 3 right, 1 -> c1        c1: 2 right
  //   c2: 1 right, 1 -> c3        c3: 2 right
  //   c4: 1 -> c5                 c5: 1 right
  //   c6: absent and never predicted
  std::vector<int> y{0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 5};
  std::vector<int> p{0, 0, 0, 1, 1, 1, 2, 3, 3, 3, 5, 5};
  const double f[7] = {2 * 3.0 / (2 * 3 + 0 + 1), 2 * 2.0 / (2 * 2 + 1 + 0), 2 * 1.0 / (2 * 1 + 0 + 1),
                       2 * 2.0 / (2 * 2 + 1 + 0), 0.0, 2 * 1.0 / (2 * 1 + 1 + 0), 0.0};
  double expect = 0;
  for (double v : f) expect += v / 7;
  EXPECT_NEAR(macro_f1(p, y, 7), expect, 1e-15);
  EXPECT_NEAR(macro_f1_from_confusion(confusion_matrix(p, y, 7)), expect, 1e-15);
}

TEST(Confusion, Examples) {
  using M = ConfusionMatrix;
  EXPECT_EQ(confusion_matrix(std::vector{0, 1, 1}, std::vector{0, 1, 1}, 2), (M{{1, 0}, {0, 2}}));
  EXPECT_EQ(confusion_matrix(std::vector{1, 0}, std::vector{0, 1}, 2), (M{{0, 1}, {1, 0}}));
  EXPECT_EQ(confusion_matrix(std::vector{0}, std::vector{0}, 3)[2], (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_THROW(confusion_matrix(std::vector{3}, std::vector{0}, 2), std::out_of_range);
}

TEST(Roc, Examples) {
  std::vector<int> y{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(std::vector{0.1, 0.2, 0.8, 0.9}, y).auc, 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector{0.9, 0.8, 0.2, 0.1}, y).auc, 0.0);
  auto flat = roc_auc(std::vector{0.5, 0.5, 0.5, 0.5}, y);
  EXPECT_DOUBLE_EQ(flat.auc, 0.5);
  EXPECT_EQ(flat.points.size(), 2u);
  try {
    roc_auc(std::vector{0.1, 0.2}, std::vector{1, 1});
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("AUC undefined"), std::string::npos);
  }
}

TEST(Roc, MannWhitneyMonotoneAndTransformInvariant) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng() % 40;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 10) / 10.0;  // coarse grid forces ties
      y[i] = static_cast<int>(i % 2 == 0 ? 1 : rng() % 2);
    }
    y[1] = 0;
    auto r = roc_auc(s, y);
    EXPECT_NEAR(r.auc, mann_whitney(s, y), 1e-12);
    for (std::size_t k = 1; k < r.points.size(); ++k) {
      EXPECT_GE(r.points[k].first, r.points[k - 1].first);
      EXPECT_GE(r.points[k].second, r.points[k - 1].second);
    }
    std::vector<double> moved(n);
    for (std::size_t i = 0; i < n; ++i) moved[i] = std::exp(3 * s[i]) - 1;
    EXPECT_NEAR(roc_auc(moved, y).auc, r.auc, 1e-12);
  }
}

TEST(Confusion, CrossChecks) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> y(30), p(30);
    for (int i = 0; i < 30; ++i) {
      y[i] = static_cast<int>(rng() % 4);
      p[i] = static_cast<int>(rng() % 4);
    }
    auto m = confusion_matrix(p, y, 4);
    EXPECT_NEAR(accuracy_from_confusion(m), accuracy(p, y), 1e-12);
    EXPECT_NEAR(macro_f1_from_confusion(m), macro_f1(p, y, 4), 1e-12);
  }
}

TEST(MeanStd, Population) {
  auto s = mean_std(std::vector{1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(s.std, std::sqrt(2.0 / 3.0), 1e-15);
}
