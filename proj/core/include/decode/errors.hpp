#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace decode {

// Malformed or inconsistent on-disk data (dataset layout, cache files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration; detected before any compute starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure during model training (NaN/Inf loss).
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, double learning_rate, std::size_t epoch)
      : std::runtime_error(what), learning_rate_(learning_rate), epoch_(epoch) {}

  double learning_rate() const noexcept { return learning_rate_; }
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  double learning_rate_;
  std::size_t epoch_;
};

// A pipeline stage failed; carries the stage name and the offending graph id
// (empty when the failure is not tied to one graph).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string graph_id, const std::string& detail)
      : std::runtime_error("stage " + stage + (graph_id.empty() ? "" : " (graph " + graph_id + ")") + ": " + detail),
        stage_(std::move(stage)),
        graph_id_(std::move(graph_id)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& graph_id() const noexcept { return graph_id_; }

 private:
  std::string stage_;
  std::string graph_id_;
};

}  // namespace decode
