#include "decode/mpnn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>

#include "decode/errors.hpp"

namespace decode {

Variant parse_variant(const std::string& s) {
  if (s == "gcn") return Variant::gcn;
  if (s == "gat") return Variant::gat;
  if (s == "gin") return Variant::gin;
  if (s == "sage" || s == "graphsage") return Variant::sage;
  throw ConfigError("unknown model variant '" + s + "' (expected gcn|gat|gin|sage)");
}

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::gcn: return "gcn";
    case Variant::gat: return "gat";
    case Variant::gin: return "gin";
    case Variant::sage: return "sage";
  }
  return "?";
}

InputMode parse_input_mode(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (u == "NF") return InputMode::nf;
  if (u == "RWW") return InputMode::rww;
  if (u == "NF_PLUS_RWW" || u == "NF+RWW") return InputMode::nf_plus_rww;
  throw ConfigError("unknown input mode '" + s + "' (expected NF|RWW|NF_plus_RWW)");
}

const char* to_string(InputMode m) noexcept {
  switch (m) {
    case InputMode::nf: return "NF";
    case InputMode::rww: return "RWW";
    case InputMode::nf_plus_rww: return "NF_plus_RWW";
  }
  return "?";
}

Matrix build_inputs(const Graph& g, const Matrix* embedding, InputMode mode) {
  const bool need_features = mode != InputMode::rww;
  const bool need_embedding = mode != InputMode::nf;
  if (need_features && !g.has_features()) {
    throw std::invalid_argument(std::string("input mode ") + to_string(mode) + " requires node features");
  }
  if (need_embedding && embedding == nullptr) {
    throw std::invalid_argument(std::string("input mode ") + to_string(mode) + " requires a walk embedding");
  }
  if (need_embedding && static_cast<std::size_t>(embedding->rows()) != g.node_count()) {
    throw std::invalid_argument("embedding rows do not match node count");
  }
  switch (mode) {
    case InputMode::nf: return g.features();
    case InputMode::rww: return *embedding;
    case InputMode::nf_plus_rww: {
      Matrix x(static_cast<Eigen::Index>(g.node_count()), g.features().cols() + embedding->cols());
      x << g.features(), *embedding;
      return x;
    }
  }
  return {};
}

namespace {

using Index = Eigen::Index;

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& d, const Matrix& z) {
  return d.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
}

double inv_sqrt_degree(const Graph& g, NodeId v) {
  return 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
}

// Symmetric-normalized propagation with self-loops; the operator is symmetric,
// so it is also its own transpose for the backward pass.
Matrix gcn_propagate(const Graph& g, const Matrix& y) {
  Matrix out(y.rows(), y.cols());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double cv = inv_sqrt_degree(g, v);
    out.row(v) = y.row(v) * (cv * cv);
    for (NodeId u : g.neighbors(v)) out.row(v) += y.row(u) * (cv * inv_sqrt_degree(g, u));
  }
  return out;
}

Matrix neighbor_sum(const Graph& g, const Matrix& y) {
  Matrix out = Matrix::Zero(y.rows(), y.cols());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (NodeId u : g.neighbors(v)) out.row(v) += y.row(u);
  }
  return out;
}

Matrix neighbor_mean(const Graph& g, const Matrix& y) {
  Matrix out = Matrix::Zero(y.rows(), y.cols());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) continue;
    for (NodeId u : g.neighbors(v)) out.row(v) += y.row(u);
    out.row(v) /= static_cast<double>(g.degree(v));
  }
  return out;
}

Matrix neighbor_mean_transpose(const Graph& g, const Matrix& d) {
  Matrix out = Matrix::Zero(d.rows(), d.cols());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) continue;
    const double w = 1.0 / static_cast<double>(g.degree(v));
    for (NodeId u : g.neighbors(v)) out.row(u) += d.row(v) * w;
  }
  return out;
}

RowVector col_sum(const Matrix& m) { return m.colwise().sum(); }

void add_bias(Matrix& m, const Matrix& b) { m.rowwise() += b.row(0); }

constexpr double kLeakySlope = 0.2;

// GAT attention lists are self followed by neighbors; entry (v, k) lives at
// offsets[v] + v + k.
std::size_t attention_base(const Graph& g, NodeId v) { return g.offsets()[v] + v; }

NodeId attention_node(const Graph& g, NodeId v, std::size_t k) { return k == 0 ? v : g.neighbors(v)[k - 1]; }

Matrix glorot(std::size_t rows, std::size_t cols, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  return m;
}

}  // namespace

struct Model::LayerCache {
  Matrix input;
  Matrix out;   // pre-activation
  Matrix aux;   // sage: neighbor mean; gin: aggregate; gat: H W
  Matrix aux2;  // gin: MLP hidden pre-activation
  std::vector<double> score;  // gat: attention logits before leaky relu
  std::vector<double> alpha;  // gat: attention weights
};

struct Model::Cache {
  std::vector<LayerCache> layers;
  RowVector pooled;
};

Model::Model(Variant variant, std::size_t input_dim, std::size_t hidden_dim, std::size_t num_layers,
             std::size_t num_classes, std::uint64_t seed)
    : variant_(variant),
      input_dim_(input_dim),
      hidden_dim_(hidden_dim),
      num_layers_(num_layers),
      num_classes_(num_classes) {
  if (input_dim == 0 || hidden_dim == 0 || num_layers == 0 || num_classes < 2) {
    throw std::invalid_argument("model dimensions must be positive with at least two classes");
  }
  std::mt19937_64 rng(seed);
  auto add = [&](std::string name, Matrix m) {
    names_.push_back(std::move(name));
    params_.push_back(std::move(m));
  };
  const std::size_t h = hidden_dim;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : h;
    const std::string p = "layer" + std::to_string(l) + ".";
    layer_offset_.push_back(params_.size());
    switch (variant) {
      case Variant::gcn:
        add(p + "weight", glorot(in, h, in, h, rng));
        add(p + "bias", Matrix::Zero(1, static_cast<Index>(h)));
        break;
      case Variant::sage:
        add(p + "weight_self", glorot(in, h, in, h, rng));
        add(p + "weight_neigh", glorot(in, h, in, h, rng));
        add(p + "bias", Matrix::Zero(1, static_cast<Index>(h)));
        break;
      case Variant::gin:
        add(p + "eps", Matrix::Zero(1, 1));
        add(p + "mlp0.weight", glorot(in, h, in, h, rng));
        add(p + "mlp0.bias", Matrix::Zero(1, static_cast<Index>(h)));
        add(p + "mlp1.weight", glorot(h, h, h, h, rng));
        add(p + "mlp1.bias", Matrix::Zero(1, static_cast<Index>(h)));
        break;
      case Variant::gat:
        add(p + "weight", glorot(in, h, in, h, rng));
        add(p + "att_src", glorot(1, h, h, 1, rng));
        add(p + "att_dst", glorot(1, h, h, 1, rng));
        add(p + "bias", Matrix::Zero(1, static_cast<Index>(h)));
        break;
    }
  }
  layer_offset_.push_back(params_.size());
  add("head.weight", glorot(h, num_classes, h, num_classes, rng));
  add("head.bias", Matrix::Zero(1, static_cast<Index>(num_classes)));
}

std::vector<Matrix> Model::zero_like() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(Matrix::Zero(p.rows(), p.cols()));
  return out;
}

bool Model::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](const Matrix& p) { return p.allFinite(); });
}

void Model::check_input(const Graph& g, const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != g.node_count() || static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw std::invalid_argument("input matrix is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                ", expected " + std::to_string(g.node_count()) + "x" + std::to_string(input_dim_));
  }
}

Matrix Model::layer_forward(std::size_t layer, const Graph& g, const Matrix& h, LayerCache* cache) const {
  const std::size_t o = layer_offset_.at(layer);
  Matrix out;
  switch (variant_) {
    case Variant::gcn: {
      out = gcn_propagate(g, h * params_[o]);
      add_bias(out, params_[o + 1]);
      break;
    }
    case Variant::sage: {
      Matrix mean = neighbor_mean(g, h);
      out = h * params_[o] + mean * params_[o + 1];
      add_bias(out, params_[o + 2]);
      if (cache) cache->aux = std::move(mean);
      break;
    }
    case Variant::gin: {
      const double eps = params_[o](0, 0);
      Matrix agg = (1.0 + eps) * h + neighbor_sum(g, h);
      Matrix hidden = agg * params_[o + 1];
      add_bias(hidden, params_[o + 2]);
      out = relu(hidden) * params_[o + 3];
      add_bias(out, params_[o + 4]);
      if (cache) {
        cache->aux = std::move(agg);
        cache->aux2 = std::move(hidden);
      }
      break;
    }
    case Variant::gat: {
      Matrix z = h * params_[o];
      const RowVector a_src = params_[o + 1].row(0), a_dst = params_[o + 2].row(0);
      Eigen::VectorXd s_src = z * a_src.transpose();
      Eigen::VectorXd s_dst = z * a_dst.transpose();
      const std::size_t n = g.node_count();
      std::vector<double> score(g.adjacency().size() + n), alpha(score.size());
      out = Matrix::Zero(z.rows(), z.cols());
      for (NodeId v = 0; v < n; ++v) {
        const std::size_t base = attention_base(g, v), len = g.degree(v) + 1;
        double max_l = -INFINITY;
        for (std::size_t k = 0; k < len; ++k) {
          const double e = s_dst(v) + s_src(attention_node(g, v, k));
          score[base + k] = e;
          max_l = std::max(max_l, e > 0 ? e : kLeakySlope * e);
        }
        double total = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
          const double e = score[base + k];
          alpha[base + k] = std::exp((e > 0 ? e : kLeakySlope * e) - max_l);
          total += alpha[base + k];
        }
        for (std::size_t k = 0; k < len; ++k) {
          alpha[base + k] /= total;
          out.row(v) += alpha[base + k] * z.row(attention_node(g, v, k));
        }
      }
      add_bias(out, params_[o + 3]);
      if (cache) {
        cache->aux = std::move(z);
        cache->score = std::move(score);
        cache->alpha = std::move(alpha);
      }
      break;
    }
  }
  if (cache) {
    cache->input = h;
    cache->out = out;
  }
  return out;
}

Matrix Model::layer_backward(std::size_t layer, const Graph& g, const LayerCache& c, const Matrix& d,
                             std::vector<Matrix>& grads) const {
  const std::size_t o = layer_offset_.at(layer);
  const Matrix& h = c.input;
  switch (variant_) {
    case Variant::gcn: {
      grads[o + 1] += col_sum(d);
      Matrix dy = gcn_propagate(g, d);
      grads[o].noalias() += h.transpose() * dy;
      return dy * params_[o].transpose();
    }
    case Variant::sage: {
      grads[o + 2] += col_sum(d);
      grads[o].noalias() += h.transpose() * d;
      grads[o + 1].noalias() += c.aux.transpose() * d;
      Matrix dh = d * params_[o].transpose();
      dh += neighbor_mean_transpose(g, d * params_[o + 1].transpose());
      return dh;
    }
    case Variant::gin: {
      const double eps = params_[o](0, 0);
      Matrix q = relu(c.aux2);
      grads[o + 3].noalias() += q.transpose() * d;
      grads[o + 4] += col_sum(d);
      Matrix dp = relu_backward(d * params_[o + 3].transpose(), c.aux2);
      grads[o + 1].noalias() += c.aux.transpose() * dp;
      grads[o + 2] += col_sum(dp);
      Matrix da = dp * params_[o + 1].transpose();
      grads[o](0, 0) += da.cwiseProduct(h).sum();
      return (1.0 + eps) * da + neighbor_sum(g, da);
    }
    case Variant::gat: {
      const Matrix& z = c.aux;
      const RowVector a_src = params_[o + 1].row(0), a_dst = params_[o + 2].row(0);
      grads[o + 3] += col_sum(d);
      Matrix dz = Matrix::Zero(z.rows(), z.cols());
      Eigen::VectorXd ds_src = Eigen::VectorXd::Zero(z.rows()), ds_dst = Eigen::VectorXd::Zero(z.rows());
      std::vector<double> dalpha;
      for (NodeId v = 0; v < g.node_count(); ++v) {
        const std::size_t base = attention_base(g, v), len = g.degree(v) + 1;
        dalpha.assign(len, 0.0);
        double weighted = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
          const NodeId u = attention_node(g, v, k);
          const double a = c.alpha[base + k];
          dalpha[k] = d.row(v).dot(z.row(u));
          dz.row(u) += a * d.row(v);
          weighted += a * dalpha[k];
        }
        for (std::size_t k = 0; k < len; ++k) {
          const double dl = c.alpha[base + k] * (dalpha[k] - weighted);
          const double de = dl * (c.score[base + k] > 0 ? 1.0 : kLeakySlope);
          ds_dst(v) += de;
          ds_src(attention_node(g, v, k)) += de;
        }
      }
      grads[o + 1].noalias() += ds_src.transpose() * z;
      grads[o + 2].noalias() += ds_dst.transpose() * z;
      dz.noalias() += ds_src * a_src + ds_dst * a_dst;
      grads[o].noalias() += h.transpose() * dz;
      return dz * params_[o].transpose();
    }
  }
  return {};
}

Matrix Model::layer_preactivation(std::size_t layer, const Graph& g, const Matrix& h) const {
  return layer_forward(layer, g, h, nullptr);
}

RowVector Model::logits(const Graph& g, const Matrix& x, Cache* cache) const {
  check_input(g, x);
  if (cache) cache->layers.resize(num_layers_);
  Matrix h = x;
  for (std::size_t l = 0; l < num_layers_; ++l) {
    h = relu(layer_forward(l, g, h, cache ? &cache->layers[l] : nullptr));
  }
  RowVector pooled = h.rows() > 0 ? RowVector(h.colwise().mean()) : RowVector::Zero(h.cols());
  const std::size_t o = layer_offset_.back();
  RowVector out = pooled * params_[o] + params_[o + 1].row(0);
  if (cache) cache->pooled = std::move(pooled);
  return out;
}

namespace {
RowVector softmax(const RowVector& z) {
  RowVector e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}
double cross_entropy(const RowVector& z, int label) {
  const double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum()) - z(label);
}
}  // namespace

RowVector Model::forward(const Graph& g, const Matrix& x) const { return softmax(logits(g, x, nullptr)); }

RowVector Model::graph_embedding(const Graph& g, const Matrix& x) const {
  Cache cache;
  logits(g, x, &cache);
  return cache.pooled;
}

Matrix Model::node_states(const Graph& g, const Matrix& x) const {
  check_input(g, x);
  Matrix h = x;
  for (std::size_t l = 0; l < num_layers_; ++l) h = relu(layer_forward(l, g, h, nullptr));
  return h;
}

double Model::loss(const Graph& g, const Matrix& x, int label, double weight) const {
  return weight * cross_entropy(logits(g, x, nullptr), label);
}

double Model::loss_and_gradient(const Graph& g, const Matrix& x, int label, double weight,
                                std::vector<Matrix>& grads) const {
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes_) throw std::invalid_argument("label out of range");
  if (grads.size() != params_.size()) grads = zero_like();
  Cache cache;
  const RowVector z = logits(g, x, &cache);
  RowVector dz = softmax(z);
  dz(label) -= 1.0;
  dz *= weight;

  const std::size_t o = layer_offset_.back();
  grads[o].noalias() += cache.pooled.transpose() * dz;
  grads[o + 1] += dz;
  const RowVector dpooled = dz * params_[o].transpose();

  const Index n = static_cast<Index>(g.node_count());
  if (n > 0) {
    Matrix d = dpooled.replicate(n, 1) / static_cast<double>(n);
    for (std::size_t l = num_layers_; l-- > 0;) {
      d = relu_backward(d, cache.layers[l].out);
      d = layer_backward(l, g, cache.layers[l], d, grads);
    }
  }
  return weight * cross_entropy(z, label);
}

double gradient_check_mpnn(Model model, const Graph& g, const Matrix& x, int label, double h,
                           std::vector<std::pair<std::string, double>>* per_tensor) {
  std::vector<Matrix> grads = model.zero_like();
  model.loss_and_gradient(g, x, label, 1.0, grads);
  double worst = 0.0;
  auto& params = model.parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    double tensor_worst = 0.0;
    for (Index k = 0; k < params[t].size(); ++k) {
      const double saved = params[t].data()[k];
      params[t].data()[k] = saved + h;
      const double up = model.loss(g, x, label);
      params[t].data()[k] = saved - h;
      const double down = model.loss(g, x, label);
      params[t].data()[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = grads[t].data()[k];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      tensor_worst = std::max(tensor_worst, std::abs(analytic - numeric) / denom);
    }
    if (per_tensor) per_tensor->emplace_back(model.parameter_names()[t], tensor_worst);
    worst = std::max(worst, tensor_worst);
  }
  return worst;
}

}  // namespace decode
