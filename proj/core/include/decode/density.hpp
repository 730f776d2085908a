#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "decode/graph.hpp"

namespace decode {

enum class DensityMetric { degree, core, truss };

DensityMetric parse_density_metric(const std::string& s);
const char* to_string(DensityMetric m) noexcept;

std::vector<std::uint32_t> degrees(const Graph& g);

/// Core numbers by bucket-based minimum-degree peeling, O(|V| + |E|).
std::vector<std::uint32_t> core_numbers(const Graph& g);

/// Truss number per undirected edge. `edges` matches Graph::edges() order.
struct EdgeTruss {
  std::vector<Edge> edges;
  std::vector<std::uint32_t> truss;
};

/// Support counting over a degree-ordered orientation followed by
/// minimum-support edge peeling, O(|E|^1.5).
EdgeTruss edge_truss_numbers(const Graph& g);

/// Mean truss number over incident edges; isolated nodes get 0. With
/// `subtract_floor` every edge truss is reduced by 2 before averaging.
std::vector<double> node_truss_numbers(const Graph& g, const EdgeTruss& et, bool subtract_floor = false);

/// Per-graph min-max scaling into [0, 1]; constant input maps to 0.5.
std::vector<double> normalize(std::span<const double> raw);

struct DensityProfile {
  DensityMetric metric = DensityMetric::degree;
  std::vector<double> raw;
  std::vector<double> phi;
};

struct DensityOptions {
  bool truss_offset = false;
};

DensityProfile density_profile(const Graph& g, DensityMetric metric, DensityOptions options = {});

}  // namespace decode
