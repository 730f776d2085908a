#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace decode {

/// Row = true label, column = predicted label.
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

/// Fraction of exact matches. Throws on empty or unequal-length input.
double accuracy(std::span<const int> preds, std::span<const int> labels);

/// 2PR / (P + R) for `positive_class`; 0 when P + R = 0.
double f1_binary(std::span<const int> preds, std::span<const int> labels, int positive_class);

/// Unweighted mean of one-vs-rest F1 over all n_classes; a class absent from
/// both labels and predictions contributes 0.
double macro_f1(std::span<const int> preds, std::span<const int> labels, std::size_t n_classes);

ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> labels, std::size_t n_classes);

double accuracy_from_confusion(const ConfusionMatrix& m);
/// Same convention as macro_f1.
double macro_f1_from_confusion(const ConfusionMatrix& m);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), from (0,0) to (1,1)
  double auc = 0.0;
};

/// ROC staircase over distinct score thresholds (equal scores form one step)
/// and trapezoid AUC. Labels must be 0/1 with both present, otherwise throws
/// std::invalid_argument("AUC undefined ...").
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

}  // namespace decode
