#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decode/matrix.hpp"

namespace decode {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable undirected simple graph in CSR form with sorted neighbor lists
/// and an optional |V| x f node feature matrix.
class Graph {
 public:
  Graph() = default;

  /// Builds a simple graph from arbitrary (possibly directed, duplicated,
  /// self-looped) edges. Both directions are inserted, duplicates collapse,
  /// self-loops are dropped. Throws std::out_of_range for ids >= node_count.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Number of undirected edges.
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const noexcept;

  /// Position of v inside u's CSR slice, offset into the global neighbor array.
  std::optional<std::size_t> slot(NodeId u, NodeId v) const noexcept;

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> adjacency() const noexcept { return neighbors_; }

  /// Undirected edges as (u, v) with u < v, lexicographically sorted.
  std::vector<Edge> edges() const;

  bool has_features() const noexcept { return features_.has_value(); }
  std::size_t feature_dim() const noexcept { return features_ ? static_cast<std::size_t>(features_->cols()) : 0; }
  const Matrix& features() const;
  void set_features(Matrix features);

  /// Original ids of the contiguous nodes (empty means identity).
  std::span<const std::int64_t> original_ids() const noexcept { return original_ids_; }
  void set_original_ids(std::vector<std::int64_t> ids);

  /// Full scan of the simple-graph invariants. Returns an empty string when
  /// valid, otherwise a description of the first violation.
  std::string check_invariants() const;

  /// Relabels nodes: node v becomes perm[v]. Feature rows follow their nodes.
  Graph permuted(std::span<const NodeId> perm) const;

  /// Stable byte serialization of structure and features, used for hashing.
  std::string canonical_bytes() const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::optional<Matrix> features_;
  std::vector<std::int64_t> original_ids_;
};

enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

const char* to_string(Split s) noexcept;

/// Graphs with class labels and a train/val/test assignment per graph.
struct LabeledGraphSet {
  std::vector<std::string> ids;
  std::vector<Graph> graphs;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<Split> splits;

  std::size_t size() const noexcept { return graphs.size(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::vector<std::size_t> indices(Split s) const;
  std::vector<std::size_t> class_counts() const;

  /// Throws std::logic_error when the set's structural invariants fail.
  void validate() const;
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

/// Per-class shuffled assignment to train/val/test. Each class contributes
/// at least one graph to every split. Deterministic for a fixed seed.
LabeledGraphSet stratified_split(const LabeledGraphSet& set, SplitFractions fractions, std::uint64_t seed);

}  // namespace decode
