#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "decode/graph.hpp"

namespace decode {

/// Reads the on-disk layout:
///   <root>/labels.json                 {"<graph-id>": "<class-name>", ...}
///   <root>/<graph-id>/edges.tsv        "src<TAB>dst" per line
///   <root>/<graph-id>/features.csv     optional, header node_id,f0,...,f{k-1}
/// Edges are symmetrized and deduplicated, self-loops dropped, node ids remapped
/// to 0..n-1 in ascending original-id order. Graphs and class names are sorted.
/// Every split is set to train. Throws DataError on any layout violation.
LabeledGraphSet load_dataset(const std::filesystem::path& root, std::size_t jobs = 1);

/// Writes `set` in the layout read by load_dataset.
void write_dataset(const LabeledGraphSet& set, const std::filesystem::path& root);

enum class Task { binary, multiclass, news_binary };

Task parse_task(const std::string& s);
const char* to_string(Task t) noexcept;

/// Class names may be hierarchical ("campaign/politics"). Binary keeps the
/// top-level part, multiclass keeps the subtype of "campaign" graphs only,
/// news_binary keeps graphs whose subtype is "news" and labels them by
/// top-level part. Flat names pass through unchanged.
LabeledGraphSet derive_task(const LabeledGraphSet& set, Task task);

/// Index of the class named "campaign" if present, else 1 (or 0 for one class).
int positive_class_index(const LabeledGraphSet& set);

struct ClassStats {
  std::string name;
  std::size_t graphs = 0;
  std::size_t min_nodes = 0, max_nodes = 0;
  double avg_nodes = 0.0;
  std::size_t min_edges = 0, max_edges = 0;
  double avg_edges = 0.0;
};

struct DatasetSummary {
  std::vector<ClassStats> classes;
  /// Every layout violation found; empty means the dataset loads cleanly.
  std::vector<std::string> issues;
  std::size_t graph_count = 0;
};

/// Like load_dataset but collects every violation instead of stopping at the first.
DatasetSummary validate_dataset(const std::filesystem::path& root, std::size_t jobs = 1);

std::string format_summary(const DatasetSummary& summary);

}  // namespace decode
