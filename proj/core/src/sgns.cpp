#include "decode/sgns.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "decode/errors.hpp"
#include "decode/io.hpp"

namespace decode {

std::vector<std::pair<NodeId, NodeId>> extract_pairs(const WalkCorpus& corpus, std::size_t window_radius) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t w = 0; w < corpus.size(); ++w) {
    auto walk = corpus.walk(w);
    const std::size_t n = walk.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= window_radius ? i - window_radius : 0;
      const std::size_t hi = std::min(n - 1, i + window_radius);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) pairs.emplace_back(walk[i], walk[j]);
      }
    }
  }
  return pairs;
}

double neg_log_sigmoid(double x) {
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sgns_loss(const Matrix& input, const Matrix& context, std::span<const SgnsExample> examples) {
  double loss = 0.0;
  for (const auto& ex : examples) {
    auto v = input.row(ex.center);
    loss += neg_log_sigmoid(context.row(ex.context).dot(v));
    for (NodeId n : ex.negatives) loss += neg_log_sigmoid(-context.row(n).dot(v));
  }
  return loss;
}

double sgns_loss_and_gradient(const Matrix& input, const Matrix& context, std::span<const SgnsExample> examples,
                              Matrix& grad_input, Matrix& grad_context) {
  grad_input = Matrix::Zero(input.rows(), input.cols());
  grad_context = Matrix::Zero(context.rows(), context.cols());
  double loss = 0.0;
  for (const auto& ex : examples) {
    auto v = input.row(ex.center);
    auto apply = [&](NodeId target, bool positive) {
      const double score = context.row(target).dot(v);
      loss += neg_log_sigmoid(positive ? score : -score);
      const double g = sgns_score_gradient(score, positive);
      grad_input.row(ex.center) += g * context.row(target);
      grad_context.row(target) += g * v;
    };
    apply(ex.context, true);
    for (NodeId n : ex.negatives) apply(n, false);
  }
  return loss;
}

double gradient_check_sgns(Matrix input, Matrix context, std::span<const SgnsExample> examples, double h) {
  Matrix gi, gc;
  sgns_loss_and_gradient(input, context, examples, gi, gc);
  double worst = 0.0;
  auto check = [&](Matrix& param, const Matrix& analytic) {
    for (Eigen::Index k = 0; k < param.size(); ++k) {
      const double saved = param.data()[k];
      param.data()[k] = saved + h;
      const double up = sgns_loss(input, context, examples);
      param.data()[k] = saved - h;
      const double down = sgns_loss(input, context, examples);
      param.data()[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-3});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  };
  check(input, gi);
  check(context, gc);
  return worst;
}

namespace {

// Plain or relaxed-atomic access to shared parameters.
template <bool Shared>
struct Access {
  static double load(const double* p) {
    if constexpr (Shared) {
      return std::atomic_ref<const double>(*p).load(std::memory_order_relaxed);
    } else {
      return *p;
    }
  }
  static void add(double* p, double delta) {
    if constexpr (Shared) {
      std::atomic_ref<double> ref(*p);
      ref.store(ref.load(std::memory_order_relaxed) + delta, std::memory_order_relaxed);
    } else {
      *p += delta;
    }
  }
};

struct Schedule {
  double lr0, lr_min;
  double total;
  double at(double processed) const {
    const double progress = std::min(1.0, processed / total);
    return std::max(lr_min, lr0 - (lr0 - lr_min) * progress);
  }
};

// Trains over walks [first, last) step `stride`. Returns summed loss and
// pair count for the epoch slice.
template <bool Shared>
std::pair<double, std::size_t> train_slice(const WalkCorpus& corpus, const SgnsConfig& cfg, Matrix& input,
                                           Matrix& context, std::discrete_distribution<std::size_t>& unigram,
                                           std::mt19937_64& rng, const Schedule& schedule,
                                           std::atomic<std::size_t>& processed, std::size_t first,
                                           std::size_t stride, std::vector<double>& grad) {
  using A = Access<Shared>;
  const std::size_t dim = cfg.dim;
  double loss = 0.0;
  std::size_t count = 0;
  for (std::size_t w = first; w < corpus.size(); w += stride) {
    auto walk = corpus.walk(w);
    const std::size_t n = walk.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= cfg.window_radius ? i - cfg.window_radius : 0;
      const std::size_t hi = std::min(n - 1, i + cfg.window_radius);
      double* v = input.row(walk[i]).data();
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const double lr = schedule.at(static_cast<double>(processed.fetch_add(1, std::memory_order_relaxed)));
        std::fill(grad.begin(), grad.end(), 0.0);
        const NodeId ctx = walk[j];
        for (std::size_t k = 0; k <= cfg.negatives_per_positive; ++k) {
          NodeId target = ctx;
          if (k > 0) {
            target = static_cast<NodeId>(unigram(rng));
            if (target == ctx) continue;
          }
          double* u = context.row(target).data();
          double score = 0.0;
          for (std::size_t d = 0; d < dim; ++d) score += A::load(v + d) * A::load(u + d);
          loss += neg_log_sigmoid(k == 0 ? score : -score);
          const double step = -lr * sgns_score_gradient(score, k == 0);
          for (std::size_t d = 0; d < dim; ++d) grad[d] += step * A::load(u + d);
          for (std::size_t d = 0; d < dim; ++d) A::add(u + d, step * A::load(v + d));
        }
        for (std::size_t d = 0; d < dim; ++d) A::add(v + d, grad[d]);
        ++count;
      }
    }
  }
  return {loss, count};
}

}  // namespace

EmbeddingMatrix train_sgns(const WalkCorpus& corpus, std::size_t node_count, const SgnsConfig& cfg) {
  if (cfg.dim < 1 || cfg.window_radius < 1) throw std::invalid_argument("dim and window_radius must be >= 1");
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  std::vector<double> counts(node_count, 0.0);
  for (NodeId t : corpus.tokens) {
    if (t >= node_count) {
      throw std::invalid_argument("walk node id " + std::to_string(t) + " outside [0, " + std::to_string(node_count) + ")");
    }
    counts[t] += 1.0;
  }
  std::size_t pairs_per_epoch = 0;
  for (std::size_t w = 0; w < corpus.size(); ++w) {
    const std::size_t n = corpus.walk(w).size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= cfg.window_radius ? i - cfg.window_radius : 0;
      pairs_per_epoch += std::min(n - 1, i + cfg.window_radius) - lo;
    }
  }
  if (pairs_per_epoch == 0) throw std::invalid_argument("corpus too short: no (center, context) pairs");

  for (double& c : counts) c = std::pow(c, 0.75);
  std::discrete_distribution<std::size_t> unigram(counts.begin(), counts.end());

  EmbeddingMatrix emb;
  const auto n = static_cast<Eigen::Index>(node_count), d = static_cast<Eigen::Index>(cfg.dim);
  emb.rows.resize(n, d);
  emb.context_rows = Matrix::Zero(n, d);
  std::mt19937_64 init_rng(cfg.seed);
  std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(cfg.dim), 0.5 / static_cast<double>(cfg.dim));
  for (Eigen::Index k = 0; k < emb.rows.size(); ++k) emb.rows.data()[k] = init(init_rng);

  const Schedule schedule{cfg.learning_rate, cfg.min_learning_rate,
                          static_cast<double>(pairs_per_epoch) * static_cast<double>(cfg.epochs)};
  std::atomic<std::size_t> processed{0};
  const std::size_t threads = std::max<std::size_t>(1, cfg.threads);

  if (threads == 1) {
    std::mt19937_64 rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
    std::vector<double> grad(cfg.dim);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      auto [loss, count] = train_slice<false>(corpus, cfg, emb.rows, emb.context_rows, unigram, rng, schedule,
                                              processed, 0, 1, grad);
      emb.epoch_loss.push_back(loss / static_cast<double>(count));
    }
  } else {
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::vector<std::pair<double, std::size_t>> part(threads);
      {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            std::mt19937_64 rng(cfg.seed ^ (0x5851f42d4c957f2dULL * (epoch * threads + t + 1)));
            auto local = unigram;
            std::vector<double> grad(cfg.dim);
            part[t] = train_slice<true>(corpus, cfg, emb.rows, emb.context_rows, local, rng, schedule, processed, t,
                                        threads, grad);
          });
        }
      }
      double loss = 0.0;
      std::size_t count = 0;
      for (auto [l, c] : part) {
        loss += l;
        count += c;
      }
      emb.epoch_loss.push_back(loss / static_cast<double>(std::max<std::size_t>(count, 1)));
    }
  }
  return emb;
}

std::string format_embedding(const Matrix& rows) {
  std::string out = std::to_string(rows.rows()) + " " + std::to_string(rows.cols()) + "\n";
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out += std::to_string(r);
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      out += ' ';
      out += format_double(rows(r, c));
    }
    out += '\n';
  }
  return out;
}

Matrix parse_embedding(std::string_view text) {
  auto next_token = [&](std::string_view& s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    std::size_t k = 0;
    while (k < s.size() && s[k] != ' ' && s[k] != '\n' && s[k] != '\t' && s[k] != '\r') ++k;
    auto tok = s.substr(0, k);
    s.remove_prefix(k);
    return tok;
  };
  auto to_int = [](std::string_view tok) {
    long long x = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc{} || p != tok.data() + tok.size() || x < 0) throw DataError("embedding: malformed integer");
    return x;
  };
  std::string_view s = text;
  const auto n = to_int(next_token(s));
  const auto d = to_int(next_token(s));
  Matrix m(n, d);
  for (long long r = 0; r < n; ++r) {
    if (to_int(next_token(s)) != r) throw DataError("embedding: row ids out of order at row " + std::to_string(r));
    for (long long c = 0; c < d; ++c) {
      auto tok = next_token(s);
      double x = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc{} || p != tok.data() + tok.size()) throw DataError("embedding: malformed value at row " + std::to_string(r));
      m(r, c) = x;
    }
  }
  if (!next_token(s).empty()) throw DataError("embedding: trailing data");
  return m;
}

}  // namespace decode
