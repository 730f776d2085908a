#include "decode/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace decode {
namespace {

void check_lengths(std::span<const int> preds, std::span<const int> labels) {
  if (preds.empty() || labels.empty()) throw std::invalid_argument("empty prediction/label lists");
  if (preds.size() != labels.size()) throw std::invalid_argument("predictions and labels differ in length");
}

double class_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

double accuracy(std::span<const int> preds, std::span<const int> labels) {
  check_lengths(preds, labels);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hit += preds[i] == labels[i];
  return static_cast<double>(hit) / static_cast<double>(preds.size());
}

double f1_binary(std::span<const int> preds, std::span<const int> labels, int positive_class) {
  check_lengths(preds, labels);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == positive_class, y = labels[i] == positive_class;
    tp += p && y;
    fp += p && !y;
    fn += !p && y;
  }
  return class_f1(tp, fp, fn);
}

ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> labels, std::size_t n_classes) {
  if (preds.size() != labels.size()) throw std::invalid_argument("predictions and labels differ in length");
  ConfusionMatrix m(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] < 0 || preds[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes ||
        static_cast<std::size_t>(preds[i]) >= n_classes) {
      throw std::out_of_range("class index outside [0, " + std::to_string(n_classes) + ")");
    }
    ++m[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(preds[i])];
  }
  return m;
}

double accuracy_from_confusion(const ConfusionMatrix& m) {
  std::size_t total = 0, diag = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    diag += m[i][i];
    total += std::accumulate(m[i].begin(), m[i].end(), std::size_t{0});
  }
  if (total == 0) throw std::invalid_argument("empty confusion matrix");
  return static_cast<double>(diag) / static_cast<double>(total);
}

double macro_f1_from_confusion(const ConfusionMatrix& m) {
  if (m.empty()) throw std::invalid_argument("empty confusion matrix");
  double sum = 0.0;
  for (std::size_t c = 0; c < m.size(); ++c) {
    std::size_t fp = 0, fn = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k == c) continue;
      fp += m[k][c];
      fn += m[c][k];
    }
    sum += class_f1(m[c][c], fp, fn);
  }
  return sum / static_cast<double>(m.size());
}

double macro_f1(std::span<const int> preds, std::span<const int> labels, std::size_t n_classes) {
  check_lengths(preds, labels);
  return macro_f1_from_confusion(confusion_matrix(preds, labels, n_classes));
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::size_t pos = 0, neg = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("ROC labels must be 0 or 1");
    (y ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) throw std::invalid_argument("AUC undefined: labels contain a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    const std::size_t tp0 = tp, fp0 = fp;
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] ? tp : fp) += 1;
    // Trapezoid in count space, normalized once at the end.
    area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0) / 2.0;
    roc.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos));
  }
  roc.auc = area / (static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace decode
