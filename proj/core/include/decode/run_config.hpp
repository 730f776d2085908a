#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "decode/dataset.hpp"
#include "decode/density.hpp"
#include "decode/graph.hpp"
#include "decode/mpnn.hpp"
#include "decode/rww.hpp"
#include "decode/sgns.hpp"
#include "decode/sweep.hpp"

namespace decode {

/// Everything a run depends on. The file format is flat "key = value" text,
/// one setting per line, '#' starts a comment. List-valued keys take comma
/// separated values. Keys:
///
///   dataset_root, output_dir, task (binary|multiclass|news_binary)
///   density_metric, threshold_rule, input_mode, variant        (lists)
///   hidden_dim, learning_rate, seeds                           (lists)
///   num_layers, epochs, patience, batch_size, class_weights
///   train_fraction, val_fraction, test_fraction
///   walk_length, walks_per_node
///   embed_dim, window_radius, negatives, embed_epochs,
///   embed_learning_rate, embed_min_learning_rate
///   truss_offset, seed, jobs
struct RunConfig {
  std::filesystem::path dataset_root;
  std::filesystem::path output_dir = "decode_out";
  Task task = Task::binary;
  std::vector<DensityMetric> density_metrics{DensityMetric::degree, DensityMetric::core, DensityMetric::truss};
  std::vector<ThresholdRule> threshold_rules{ThresholdRule::fixed_half, ThresholdRule::median,
                                             ThresholdRule::midpoint};
  std::vector<InputMode> input_modes{InputMode::nf, InputMode::rww, InputMode::nf_plus_rww};
  std::vector<Variant> variants{Variant::gcn, Variant::gat, Variant::gin, Variant::sage};
  std::vector<std::size_t> hidden_dims{128, 256, 512, 1024};
  std::vector<double> learning_rates{1e-3, 1e-4, 1e-5};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t num_layers = 2;
  std::size_t epochs = 200;
  std::size_t patience = 20;
  std::size_t batch_size = 16;
  bool class_weights = false;
  SplitFractions split;
  WalkConfig walk;  // threshold_rule is taken from threshold_rules per run
  SgnsConfig sgns;
  bool truss_offset = false;
  std::uint64_t seed = 0;  // walks and embeddings
  std::size_t jobs = 1;

  /// Throws ConfigError on empty lists or out-of-range values.
  void validate() const;
  /// Fields that determine sweep results (jobs excluded).
  SweepConfig sweep_config() const;
  bool needs_embeddings() const;
};

/// Applies one "key = value" setting; throws ConfigError for unknown keys or
/// unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses config text on top of the defaults, then validates.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text form: every key in a fixed order. Parsing it back yields
/// an identical config.
std::string format_run_config(const RunConfig& cfg);

}  // namespace decode
