#include "decode/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "decode/errors.hpp"
#include "decode/io.hpp"
#include "decode/parallel.hpp"

namespace decode {
namespace {

struct Adam {
  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;
  std::vector<Matrix> m, v;

  void apply(std::vector<Matrix>& params, const std::vector<Matrix>& grads) {
    if (m.empty()) {
      for (const auto& p : params) {
        m.push_back(Matrix::Zero(p.rows(), p.cols()));
        v.push_back(Matrix::Zero(p.rows(), p.cols()));
      }
    }
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t t = 0; t < params.size(); ++t) {
      m[t] = beta1 * m[t] + (1.0 - beta1) * grads[t];
      v[t] = beta2 * v[t] + (1.0 - beta2) * grads[t].cwiseProduct(grads[t]);
      params[t].array() -= lr * (m[t].array() / c1) / ((v[t].array() / c2).sqrt() + eps);
    }
  }
};

double mean_loss(const Model& model, const LabeledGraphSet& data, std::span<const Matrix> inputs,
                 const std::vector<std::size_t>& idx, std::size_t jobs) {
  std::vector<double> losses(idx.size());
  parallel_for(idx.size(), jobs, [&](std::size_t k) {
    const std::size_t i = idx[k];
    losses[k] = model.loss(data.graphs[i], inputs[i], data.labels[i]);
  });
  return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(idx.size());
}

}  // namespace

TrainResult train(const ModelConfig& cfg, const LabeledGraphSet& data, std::span<const Matrix> inputs,
                  std::size_t jobs) {
  data.validate();
  if (inputs.size() != data.size()) throw std::invalid_argument("inputs not aligned with graphs");
  const auto train_idx = data.indices(Split::train);
  auto val_idx = data.indices(Split::val);
  if (train_idx.empty()) throw std::invalid_argument("empty train split");
  std::set<int> seen;
  for (auto i : train_idx) seen.insert(data.labels[i]);
  if (seen.size() < 2) throw std::invalid_argument("training split contains a single class");
  if (cfg.num_layers < 1 || cfg.batch_size < 1) throw std::invalid_argument("num_layers and batch_size must be >= 1");

  const auto input_dim = static_cast<std::size_t>(inputs[train_idx.front()].cols());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (static_cast<std::size_t>(inputs[i].cols()) != input_dim ||
        static_cast<std::size_t>(inputs[i].rows()) != data.graphs[i].node_count()) {
      throw std::invalid_argument("input matrix for graph '" + data.ids[i] + "' has the wrong shape");
    }
  }

  TrainResult result;
  Model model(cfg.variant, input_dim, cfg.hidden_dim, cfg.num_layers, data.num_classes(), cfg.seed);

  std::vector<double> class_weight(data.num_classes(), 1.0);
  if (cfg.class_weights) {
    std::vector<double> count(data.num_classes(), 0.0);
    for (auto i : train_idx) count[static_cast<std::size_t>(data.labels[i])] += 1.0;
    for (std::size_t c = 0; c < count.size(); ++c) {
      if (count[c] > 0) {
        class_weight[c] = static_cast<double>(train_idx.size()) / (static_cast<double>(seen.size()) * count[c]);
      }
    }
  }

  Adam adam{cfg.learning_rate};
  std::mt19937_64 rng(cfg.seed ^ 0xa0761d6478bd642fULL);
  std::vector<std::size_t> order = train_idx;
  const std::size_t slots = std::min(cfg.batch_size, order.size());
  std::vector<std::vector<Matrix>> slot_grads(slots, model.zero_like());
  std::vector<double> slot_loss(slots);
  std::vector<Matrix> grads = model.zero_like();

  Model best = model;
  double best_val = INFINITY;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - start);
      parallel_for(count, jobs, [&](std::size_t k) {
        const std::size_t i = order[start + k];
        for (auto& gm : slot_grads[k]) gm.setZero();
        const int y = data.labels[i];
        slot_loss[k] = model.loss_and_gradient(data.graphs[i], inputs[i], y,
                                               class_weight[static_cast<std::size_t>(y)], slot_grads[k]);
      });
      double batch_loss = 0.0;
      for (auto& gm : grads) gm.setZero();
      for (std::size_t k = 0; k < count; ++k) {
        batch_loss += slot_loss[k];
        for (std::size_t t = 0; t < grads.size(); ++t) grads[t] += slot_grads[k][t];
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch) + " with learning rate " +
                                format_double(cfg.learning_rate),
                            cfg.learning_rate, epoch);
      }
      epoch_loss += batch_loss;
      for (auto& gm : grads) gm /= static_cast<double>(count);
      adam.apply(model.parameters(), grads);
      if (!model.all_finite()) {
        throw TrainingError("non-finite parameters at epoch " + std::to_string(epoch) + " with learning rate " +
                                format_double(cfg.learning_rate),
                            cfg.learning_rate, epoch);
      }
    }
    const double train_loss = epoch_loss / static_cast<double>(order.size());
    const double val_loss = val_idx.empty() ? train_loss : mean_loss(model, data, inputs, val_idx, jobs);
    if (!std::isfinite(val_loss)) {
      throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch) + " with learning rate " +
                              format_double(cfg.learning_rate),
                          cfg.learning_rate, epoch);
    }
    result.log.push_back({epoch, train_loss, val_loss});
    if (val_loss < best_val) {
      best_val = val_loss;
      best = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  result.model = std::move(best);
  result.best_val_loss = best_val;
  return result;
}

int argmax_label(const RowVector& probabilities) {
  int best = 0;
  for (Eigen::Index c = 1; c < probabilities.size(); ++c) {
    if (probabilities(c) > probabilities(best)) best = static_cast<int>(c);
  }
  return best;
}

std::vector<Prediction> predict_dataset(const Model& model, const LabeledGraphSet& data,
                                        std::span<const Matrix> inputs, std::span<const std::size_t> indices,
                                        std::size_t jobs) {
  std::vector<Prediction> out(indices.size());
  parallel_for(indices.size(), jobs, [&](std::size_t k) {
    const std::size_t i = indices[k];
    out[k].probabilities = model.forward(data.graphs.at(i), inputs[i]);
    out[k].label = argmax_label(out[k].probabilities);
  });
  return out;
}

std::string format_train_log(const std::vector<EpochRecord>& log) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (const auto& r : log) {
    out += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," + format_double(r.val_loss) + "\n";
  }
  return out;
}

}  // namespace decode
