#include "decode/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace decode {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Geometric skipping over the pairs (i, j), i < j, of `nodes`.
void add_bernoulli_pairs(std::span<const NodeId> nodes, double p, std::mt19937_64& rng, std::vector<Edge>& out) {
  const std::size_t n = nodes.size();
  if (n < 2 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(nodes[i], nodes[j]);
    return;
  }
  std::geometric_distribution<std::uint64_t> skip(p);
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  std::uint64_t k = skip(rng);
  // Pair index k maps to row i, column j by walking rows; amortized O(n + edges).
  std::size_t i = 0;
  std::uint64_t row_start = 0;
  while (k < total) {
    while (k >= row_start + (n - 1 - i)) {
      row_start += n - 1 - i;
      ++i;
    }
    std::size_t j = i + 1 + static_cast<std::size_t>(k - row_start);
    out.emplace_back(nodes[i], nodes[j]);
    k += 1 + skip(rng);
  }
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_graphs_per_class == 0) throw std::invalid_argument("n_graphs_per_class must be positive");
  if (min_nodes == 0 || min_nodes > max_nodes) throw std::invalid_argument("node_count_range is empty");
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(dense_core_fraction) || !unit(intra_core_edge_prob) || !unit(background_edge_prob)) {
    throw std::invalid_argument("fractions and probabilities must lie in [0, 1]");
  }
  if (!(dense_core_fraction > 0.0)) throw std::invalid_argument("dense_core_fraction must be positive for the campaign class");
  if (!(intra_core_edge_prob > background_edge_prob)) {
    throw std::invalid_argument("intra_core_edge_prob must exceed background_edge_prob");
  }
}

LabeledGraphSet generate_synthetic(const GeneratorConfig& cfg) {
  cfg.validate();
  LabeledGraphSet set;
  set.class_names = {"background", "campaign"};
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t idx = 0; idx < cfg.n_graphs_per_class; ++idx) {
      std::mt19937_64 rng(mix(cfg.seed ^ mix(static_cast<std::uint64_t>(cls) * 1000003ULL + idx)));
      std::uniform_int_distribution<std::size_t> size_dist(cfg.min_nodes, cfg.max_nodes);
      const std::size_t n = size_dist(rng);

      std::vector<NodeId> all(n);
      std::iota(all.begin(), all.end(), NodeId{0});
      std::vector<Edge> edges;
      add_bernoulli_pairs(all, cfg.background_edge_prob, rng, edges);
      if (cls == 1) {
        auto core_size = static_cast<std::size_t>(std::lround(cfg.dense_core_fraction * static_cast<double>(n)));
        core_size = std::clamp<std::size_t>(core_size, std::min<std::size_t>(2, n), n);
        std::vector<NodeId> core = all;
        std::shuffle(core.begin(), core.end(), rng);
        core.resize(core_size);
        std::sort(core.begin(), core.end());
        add_bernoulli_pairs(core, cfg.intra_core_edge_prob, rng, edges);
      }
      Graph g = Graph::from_edges(n, edges);
      if (cfg.feature_dim > 0) {
        std::normal_distribution<double> noise(0.0, 1.0);
        Matrix f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.feature_dim));
        for (Eigen::Index k = 0; k < f.size(); ++k) f.data()[k] = noise(rng);
        g.set_features(std::move(f));
      }
      char id[64];
      std::snprintf(id, sizeof id, "syn_%s_%04zu", set.class_names[static_cast<std::size_t>(cls)].c_str(), idx);
      set.ids.emplace_back(id);
      set.graphs.push_back(std::move(g));
      set.labels.push_back(cls);
      set.splits.push_back(Split::train);
    }
  }
  return set;
}

Graph random_graph_with_edges(std::size_t node_count, std::size_t edge_count, std::uint64_t seed) {
  const std::uint64_t max_edges = static_cast<std::uint64_t>(node_count) * (node_count - 1) / 2;
  if (node_count < 2 || edge_count > max_edges) throw std::invalid_argument("edge count exceeds simple-graph capacity");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(node_count - 1));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edge_count * 2);
  std::vector<Edge> edges;
  edges.reserve(edge_count);
  while (edges.size() < edge_count) {
    NodeId u = pick(rng), v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) edges.emplace_back(u, v);
  }
  return Graph::from_edges(node_count, edges);
}

Graph erdos_renyi(std::size_t node_count, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NodeId> all(node_count);
  std::iota(all.begin(), all.end(), NodeId{0});
  std::vector<Edge> edges;
  add_bernoulli_pairs(all, p, rng, edges);
  return Graph::from_edges(node_count, edges);
}

}  // namespace decode
