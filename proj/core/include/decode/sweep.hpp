#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decode/density.hpp"
#include "decode/graph.hpp"
#include "decode/metrics.hpp"
#include "decode/mpnn.hpp"
#include "decode/rww.hpp"

namespace decode {

/// One table cell: model variant x input configuration. NF cells carry no
/// density metric or threshold rule.
struct SweepCell {
  Variant variant = Variant::gcn;
  InputMode input_mode = InputMode::rww;
  std::optional<DensityMetric> metric;
  std::optional<ThresholdRule> rule;

  /// File-name-safe key, e.g. "sage_RWW_degree_fixed_half" or "gcn_NF".
  std::string key() const;
};

struct MetricsReport {
  SweepCell cell;
  bool binary = true;
  std::vector<std::string> class_names;
  int positive_class = 1;
  std::size_t hidden_dim = 0;  // selected by validation accuracy
  double learning_rate = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> seed_accuracy;
  MeanStd val_accuracy;
  MeanStd accuracy;
  MeanStd f1;  // binary F1 of the positive class, or macro-F1
  ConfusionMatrix confusion;  // summed over seeds
  std::vector<std::pair<double, double>> roc;  // pooled over seeds, binary only
  double auc = 0.0;
  std::string error;  // set when every grid point failed
};

/// Per-graph node input matrices for each (metric, rule, mode) combination.
class InputBank {
 public:
  static std::string key(std::optional<DensityMetric> metric, std::optional<ThresholdRule> rule, InputMode mode);
  void put(const std::string& key, std::vector<Matrix> inputs) { inputs_[key] = std::move(inputs); }
  const std::vector<Matrix>* find(const std::string& key) const;

 private:
  std::map<std::string, std::vector<Matrix>> inputs_;
};

struct SweepConfig {
  std::vector<DensityMetric> metrics{DensityMetric::degree, DensityMetric::core, DensityMetric::truss};
  std::vector<ThresholdRule> rules{ThresholdRule::fixed_half, ThresholdRule::median, ThresholdRule::midpoint};
  std::vector<InputMode> input_modes{InputMode::nf, InputMode::rww, InputMode::nf_plus_rww};
  std::vector<Variant> variants{Variant::gcn, Variant::gat, Variant::gin, Variant::sage};
  std::vector<std::size_t> hidden_dims{128, 256, 512, 1024};
  std::vector<double> learning_rates{1e-3, 1e-4, 1e-5};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  ModelConfig base;  // epochs, patience, layers, batch size, class weights
  SplitFractions fractions;
  std::size_t jobs = 1;
};

/// Cells in a stable order: variant, then input mode, then metric, then rule.
std::vector<SweepCell> enumerate_cells(const SweepConfig& cfg);

/// For every cell and (hidden, lr) grid point, trains one model per seed on
/// stratified_split(data, fractions, seed). The grid point with the best mean
/// validation accuracy (ties: lower lr, then smaller hidden) is reported with
/// test metrics as mean +- population std over seeds. Failures are recorded
/// per cell and do not stop other cells.
std::vector<MetricsReport> grid_sweep(const LabeledGraphSet& data, const InputBank& bank, const SweepConfig& cfg);

}  // namespace decode
