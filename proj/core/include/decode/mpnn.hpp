#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "decode/graph.hpp"
#include "decode/matrix.hpp"

namespace decode {

enum class Variant { gcn, gat, gin, sage };
enum class InputMode { nf, rww, nf_plus_rww };

Variant parse_variant(const std::string& s);
const char* to_string(Variant v) noexcept;
/// Accepts NF|RWW|NF_plus_RWW (case-insensitive, "NF+RWW" too).
InputMode parse_input_mode(const std::string& s);
const char* to_string(InputMode m) noexcept;

struct ModelConfig {
  Variant variant = Variant::gcn;
  std::size_t hidden_dim = 128;
  std::size_t num_layers = 2;
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t patience = 20;
  std::size_t batch_size = 16;
  InputMode input_mode = InputMode::rww;
  bool class_weights = false;
  std::uint64_t seed = 1;
};

/// Node input matrix for a mode: features, embedding rows, or [features | embedding].
/// Throws std::invalid_argument naming the mode when a source is missing.
Matrix build_inputs(const Graph& g, const Matrix* embedding, InputMode mode);

/// Graph classifier: num_layers message-passing layers with ReLU, mean
/// pooling over nodes, then an affine softmax head.
///
/// Layer rules, H the layer input and N(v) the neighbors of v:
///   gcn   h'_v = sum_{u in N(v)+v} (H W)_u / sqrt((d_u+1)(d_v+1)) + b
///   sage  h'_v = H_v W_self + mean_{u in N(v)} H_u W_neigh + b
///   gin   h'_v = MLP((1+eps) H_v + sum_{u in N(v)} H_u), MLP = W2 relu(W1 x + b1) + b2
///   gat   h'_v = sum_{u in N(v)+v} alpha_vu (H W)_u + b,
///         alpha_v. = softmax_u leaky_relu_0.2(a_dst.(HW)_v + a_src.(HW)_u)
class Model {
 public:
  Model() = default;
  /// Glorot-uniform weights, zero biases, eps = 0.
  Model(Variant variant, std::size_t input_dim, std::size_t hidden_dim, std::size_t num_layers,
        std::size_t num_classes, std::uint64_t seed);

  Variant variant() const noexcept { return variant_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }
  std::size_t num_layers() const noexcept { return num_layers_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  std::vector<Matrix>& parameters() noexcept { return params_; }
  const std::vector<Matrix>& parameters() const noexcept { return params_; }
  const std::vector<std::string>& parameter_names() const noexcept { return names_; }
  /// Index of the first tensor of `layer` (the head follows the last layer).
  std::size_t layer_offset(std::size_t layer) const { return layer_offset_.at(layer); }

  /// Class probabilities for one graph.
  RowVector forward(const Graph& g, const Matrix& x) const;
  /// Mean-pooled final node states.
  RowVector graph_embedding(const Graph& g, const Matrix& x) const;
  /// Final node states (after the last ReLU).
  Matrix node_states(const Graph& g, const Matrix& x) const;
  /// Output of a single layer before its ReLU.
  Matrix layer_preactivation(std::size_t layer, const Graph& g, const Matrix& h) const;

  /// weight * cross-entropy of the true label.
  double loss(const Graph& g, const Matrix& x, int label, double weight = 1.0) const;
  /// Same loss; accumulates d loss / d parameter into `grads` (shaped like parameters()).
  double loss_and_gradient(const Graph& g, const Matrix& x, int label, double weight,
                           std::vector<Matrix>& grads) const;

  /// Zero tensors with the parameter shapes.
  std::vector<Matrix> zero_like() const;

  bool all_finite() const;

 private:
  struct LayerCache;
  struct Cache;

  Matrix layer_forward(std::size_t layer, const Graph& g, const Matrix& h, LayerCache* cache) const;
  Matrix layer_backward(std::size_t layer, const Graph& g, const LayerCache& cache, const Matrix& d_out,
                        std::vector<Matrix>& grads) const;
  RowVector logits(const Graph& g, const Matrix& x, Cache* cache) const;
  void check_input(const Graph& g, const Matrix& x) const;

  Variant variant_ = Variant::gcn;
  std::size_t input_dim_ = 0, hidden_dim_ = 0, num_layers_ = 0, num_classes_ = 0;
  std::vector<Matrix> params_;
  std::vector<std::string> names_;
  std::vector<std::size_t> layer_offset_;
};

/// Max relative error between analytic parameter gradients and central
/// differences with step h, over every entry of every tensor. Relative error
/// uses max(|analytic|, |numeric|, 1e-6) as the denominator. When `per_tensor`
/// is given it receives the worst error for each named tensor.
double gradient_check_mpnn(Model model, const Graph& g, const Matrix& x, int label, double h = 1e-5,
                           std::vector<std::pair<std::string, double>>* per_tensor = nullptr);

}  // namespace decode
