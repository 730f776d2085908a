#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decode/density.hpp"
#include "decode/graph.hpp"
#include "decode/run_config.hpp"
#include "decode/sweep.hpp"

namespace decode {

using LogSink = std::function<void(const std::string&)>;

/// Writes each line to stderr.
void stderr_log(const std::string& line);

/// Content-addressed store under <root>/<stage>/<key>. Each entry carries a
/// SHA-256 of its body; an entry that fails the check is reported through
/// the sink and treated as missing.
class StageCache {
 public:
  StageCache(std::filesystem::path root, LogSink log);

  std::optional<std::string> get(const std::string& stage, const std::string& key) const;
  void put(const std::string& stage, const std::string& key, std::string_view body) const;
  std::filesystem::path path(const std::string& stage, const std::string& key) const;

 private:
  std::filesystem::path root_;
  LogSink log_;
};

/// "node_id,raw,phi" using original node ids, rows in internal node order.
std::string format_density_csv(const Graph& g, const DensityProfile& profile);
DensityProfile parse_density_csv(std::string_view text, DensityMetric metric);

/// SHA-256 of the graph's canonical bytes.
std::string graph_hash(const Graph& g);
/// SHA-256 over graph ids, labels, class names and per-graph hashes.
std::string dataset_hash(const LabeledGraphSet& set, const std::vector<std::string>& graph_hashes);

/// load_dataset followed by derive_task. Failures become StageError("load").
LabeledGraphSet load_task_dataset(const RunConfig& cfg);

struct StageStatus {
  std::string stage;
  std::size_t computed = 0;
  std::size_t cached = 0;
  bool all_cached() const noexcept { return computed == 0; }
};

/// Cache keys of the embedding stages, indexed [metric][graph] for density
/// and [metric][rule][graph] (flattened) for walk and embed.
struct EmbeddingKeys {
  std::vector<std::string> density, walk, embed;
};

/// Runs density, walk and embed for every graph and every configured metric
/// and rule, reusing cache entries. Appends one status per stage.
EmbeddingKeys run_embedding_stages(const RunConfig& cfg, const LabeledGraphSet& data,
                                   const std::vector<std::string>& graph_hashes, const StageCache& cache,
                                   const LogSink& log, std::vector<StageStatus>& stages);

/// Node input matrices for every cell of the configured grid, read back from
/// the embed cache.
InputBank build_input_bank(const RunConfig& cfg, const LabeledGraphSet& data, const StageCache& cache,
                           const EmbeddingKeys& keys);

struct PipelineResult {
  std::vector<MetricsReport> reports;
  std::vector<StageStatus> stages;
};

/// load -> density -> walk -> embed -> eval. Every stage after load is cached
/// under output_dir/cache by a hash chain of graph bytes and stage settings,
/// and downstream stages always consume the serialized stage output, so a
/// cached run and a fresh run produce the same bytes. Writes report.json,
/// summary.md, roc/confusion CSVs and run_manifest.json into output_dir.
/// Throws StageError naming the stage and graph on failure.
PipelineResult run_pipeline(const RunConfig& cfg, const LogSink& log = stderr_log);

}  // namespace decode
