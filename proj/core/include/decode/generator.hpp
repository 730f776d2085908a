#pragma once

#include <cstddef>
#include <cstdint>

#include "decode/graph.hpp"

namespace decode {

/// Two-class planted-density generator. Class "campaign" graphs get an
/// Erdos-Renyi core on a random subset of nodes on top of the background
/// G(n, p); class "background" graphs are background only.
struct GeneratorConfig {
  std::size_t n_graphs_per_class = 60;
  std::size_t min_nodes = 90;
  std::size_t max_nodes = 110;
  double dense_core_fraction = 0.3;
  double intra_core_edge_prob = 0.5;
  double background_edge_prob = 0.01;
  /// Gaussian noise features per node; 0 disables features.
  std::size_t feature_dim = 4;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Class names are {"background", "campaign"} with labels 0 and 1. Graph ids
/// are "syn_<class>_<index>". Bit-reproducible for a fixed seed.
LabeledGraphSet generate_synthetic(const GeneratorConfig& cfg);

/// One G(n, m)-style graph with `edge_count` distinct undirected edges drawn
/// uniformly; used for scale tests and benchmarks.
Graph random_graph_with_edges(std::size_t node_count, std::size_t edge_count, std::uint64_t seed);

/// Erdos-Renyi G(n, p).
Graph erdos_renyi(std::size_t node_count, double p, std::uint64_t seed);

}  // namespace decode
