#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "decode/graph.hpp"
#include "decode/mpnn.hpp"

namespace decode {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  Model model;  // parameters from the epoch with the lowest validation loss
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
};

/// Mini-batch Adam on mean cross-entropy over the train split, with early
/// stopping on validation loss. `inputs[i]` is the node input matrix of
/// data.graphs[i]. Deterministic for a fixed cfg.seed regardless of `jobs`.
///
/// Throws std::invalid_argument for an empty or single-class train split and
/// TrainingError when the loss or the parameters stop being finite.
TrainResult train(const ModelConfig& cfg, const LabeledGraphSet& data, std::span<const Matrix> inputs,
                  std::size_t jobs = 1);

struct Prediction {
  int label = 0;
  RowVector probabilities;
};

/// Highest-probability class; ties go to the lowest index.
int argmax_label(const RowVector& probabilities);

std::vector<Prediction> predict_dataset(const Model& model, const LabeledGraphSet& data,
                                        std::span<const Matrix> inputs, std::span<const std::size_t> indices,
                                        std::size_t jobs = 1);

/// "epoch,train_loss,val_loss" CSV.
std::string format_train_log(const std::vector<EpochRecord>& log);

}  // namespace decode
