#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "decode/density.hpp"
#include "decode/graph.hpp"

namespace decode {

enum class ThresholdRule { fixed_half, median, midpoint };

/// Accepts fixed_half|median|midpoint and the short forms 0.5|mid.
ThresholdRule parse_threshold_rule(const std::string& s);
const char* to_string(ThresholdRule r) noexcept;

struct WalkConfig {
  std::size_t walk_length = 100;
  ThresholdRule threshold_rule = ThresholdRule::fixed_half;
  std::size_t walks_per_node = 1;
  std::uint64_t seed = 0;
};

/// Walks stored back to back; walk i spans tokens[offsets[i], offsets[i+1]).
/// Ordered by seed node, then walk index.
struct WalkCorpus {
  std::string graph_id;
  std::vector<NodeId> tokens;
  std::vector<std::size_t> offsets{0};

  std::size_t size() const noexcept { return offsets.size() - 1; }
  std::span<const NodeId> walk(std::size_t i) const noexcept {
    return {tokens.data() + offsets[i], tokens.data() + offsets[i + 1]};
  }
  void add(std::span<const NodeId> w);

  friend bool operator==(const WalkCorpus&, const WalkCorpus&) = default;
};

/// tau for the profile: 0.5, median of phi (mean of middle pair for even
/// counts), or midpoint of the phi range.
double resolve_threshold(const DensityProfile& profile, ThresholdRule rule);

/// Next-step probabilities over g.neighbors(v), aligned with that span.
/// If phi(v) > tau the weights are phi(u), otherwise 1 - phi(u); an all-zero
/// weight vector falls back to uniform. Throws std::invalid_argument if v is
/// isolated.
std::vector<double> transition_distribution(const Graph& g, const DensityProfile& profile, NodeId v, double tau);

/// Precomputed cumulative transition tables for every node. Each node's
/// branch depends only on its own phi, so one table per node suffices.
class TransitionTable {
 public:
  TransitionTable(const Graph& g, const DensityProfile& profile, double tau);

  /// Maps u in [0, 1) to a neighbor of v by inverse-CDF lookup.
  NodeId next(NodeId v, double u) const;

  template <typename Rng>
  NodeId sample(NodeId v, Rng& rng) const {
    return next(v, std::generate_canonical<double, 53>(rng));
  }

 private:
  const Graph* graph_;
  std::vector<double> cumulative_;
};

/// Independent RNG stream for one (seed node, walk index) pair.
std::mt19937_64 walk_stream(std::uint64_t seed, NodeId node, std::size_t walk_index);

/// walks_per_node walks from every node; a walk stops early at a node with
/// no neighbors. Output is identical for any `jobs`.
WalkCorpus generate_walks(const Graph& g, const DensityProfile& profile, const WalkConfig& cfg, std::size_t jobs = 1);

/// One walk per line, space-separated node ids.
std::string format_walks(const WalkCorpus& corpus);
WalkCorpus parse_walks(std::string_view text);

}  // namespace decode
