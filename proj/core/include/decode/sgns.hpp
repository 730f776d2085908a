#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "decode/matrix.hpp"
#include "decode/rww.hpp"

namespace decode {

struct SgnsConfig {
  std::size_t dim = 128;
  /// Context nodes on each side of the center; 2 gives four context nodes.
  std::size_t window_radius = 2;
  std::size_t negatives_per_positive = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  std::uint64_t seed = 0;
  /// 1 is the deterministic mode; more threads use lock-free shared updates
  /// and give run-to-run differences in low-order bits.
  std::size_t threads = 1;
};

struct EmbeddingMatrix {
  Matrix rows;          // |V| x dim input vectors, the embedding
  Matrix context_rows;  // |V| x dim output vectors
  std::vector<double> epoch_loss;  // mean per-pair loss for each epoch
};

/// (center, context) for every position and every other position within
/// `window_radius`, truncated at walk ends.
std::vector<std::pair<NodeId, NodeId>> extract_pairs(const WalkCorpus& corpus, std::size_t window_radius);

/// One positive pair with its negatives, scored as
///   -log sigmoid(u_context . v_center) - sum_k log sigmoid(-u_neg_k . v_center)
/// where v rows come from the input matrix and u rows from the context matrix.
struct SgnsExample {
  NodeId center = 0;
  NodeId context = 0;
  std::vector<NodeId> negatives;
};

/// d loss / d score for a target with label 1 (context) or 0 (negative).
inline double sgns_score_gradient(double score, bool positive) {
  const double s = 1.0 / (1.0 + std::exp(-score));
  return positive ? s - 1.0 : s;
}

/// Numerically stable -log sigmoid(x).
double neg_log_sigmoid(double x);

double sgns_loss(const Matrix& input, const Matrix& context, std::span<const SgnsExample> examples);

/// Total loss; gradients are written into grad_input / grad_context (resized).
double sgns_loss_and_gradient(const Matrix& input, const Matrix& context, std::span<const SgnsExample> examples,
                              Matrix& grad_input, Matrix& grad_context);

/// Max relative error of the analytic gradient against central differences
/// with step h, over every entry of both matrices. Relative error uses
/// max(|analytic|, |numeric|, 1e-3) as the denominator.
double gradient_check_sgns(Matrix input, Matrix context, std::span<const SgnsExample> examples, double h = 1e-5);

/// Throws std::invalid_argument for out-of-range ids and "corpus too short"
/// when the corpus yields no pairs.
EmbeddingMatrix train_sgns(const WalkCorpus& corpus, std::size_t node_count, const SgnsConfig& cfg);

/// First line "node_count dim", then "node_id v0 ... v{d-1}".
std::string format_embedding(const Matrix& rows);
Matrix parse_embedding(std::string_view text);

}  // namespace decode
