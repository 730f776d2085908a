#include "decode/density.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "decode/errors.hpp"

namespace decode {

DensityMetric parse_density_metric(const std::string& s) {
  if (s == "degree") return DensityMetric::degree;
  if (s == "core") return DensityMetric::core;
  if (s == "truss") return DensityMetric::truss;
  throw ConfigError("unknown density metric '" + s + "' (expected degree|core|truss)");
}

const char* to_string(DensityMetric m) noexcept {
  switch (m) {
    case DensityMetric::degree: return "degree";
    case DensityMetric::core: return "core";
    case DensityMetric::truss: return "truss";
  }
  return "?";
}

std::vector<std::uint32_t> degrees(const Graph& g) {
  std::vector<std::uint32_t> out(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) out[v] = static_cast<std::uint32_t>(g.degree(v));
  return out;
}

namespace {

// Bucket queue over keys in [0, max_key]: items sorted by key, `pos` gives
// each item's index in `order`, `bin[k]` the first index with key >= k.
// Decrementing a key swaps the item to the front of its bucket.
class BucketQueue {
 public:
  explicit BucketQueue(std::vector<std::uint32_t>& key) : key_(key) {
    const std::size_t n = key.size();
    std::uint32_t max_key = n ? *std::max_element(key.begin(), key.end()) : 0;
    bin_.assign(static_cast<std::size_t>(max_key) + 2, 0);
    for (auto k : key) ++bin_[k + 1];
    std::partial_sum(bin_.begin(), bin_.end(), bin_.begin());
    order_.resize(n);
    pos_.resize(n);
    std::vector<std::size_t> next(bin_.begin(), bin_.end() - 1);
    // Stable fill keeps ties in ascending id order.
    for (std::size_t i = 0; i < n; ++i) {
      pos_[i] = next[key[i]]++;
      order_[pos_[i]] = i;
    }
  }

  std::size_t at(std::size_t i) const { return order_[i]; }
  std::size_t size() const { return order_.size(); }

  void decrement(std::size_t item) {
    std::uint32_t k = key_[item];
    std::size_t first = bin_[k];
    std::size_t other = order_[first];
    if (other != item) {
      std::swap(order_[pos_[item]], order_[first]);
      pos_[other] = pos_[item];
      pos_[item] = first;
    }
    ++bin_[k];
    --key_[item];
  }

 private:
  std::vector<std::uint32_t>& key_;
  std::vector<std::size_t> bin_, order_, pos_;
};

}  // namespace

std::vector<std::uint32_t> core_numbers(const Graph& g) {
  std::vector<std::uint32_t> core = degrees(g);
  BucketQueue queue(core);
  std::vector<char> done(g.node_count(), 0);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    auto v = static_cast<NodeId>(queue.at(i));
    done[v] = 1;
    for (NodeId u : g.neighbors(v)) {
      if (!done[u] && core[u] > core[v]) queue.decrement(u);
    }
  }
  return core;
}

EdgeTruss edge_truss_numbers(const Graph& g) {
  const std::size_t n = g.node_count();
  EdgeTruss result;
  result.edges = g.edges();
  const std::size_t m = result.edges.size();

  // Edge id for every CSR slot, both directions.
  std::vector<std::uint32_t> slot_edge(g.adjacency().size());
  {
    std::uint32_t next = 0;
    for (NodeId u = 0; u < n; ++u) {
      auto base = g.offsets()[u];
      auto nbrs = g.neighbors(u);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (u < nbrs[k]) slot_edge[base + k] = next++;
      }
    }
    for (NodeId u = 0; u < n; ++u) {
      auto base = g.offsets()[u];
      auto nbrs = g.neighbors(u);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (u > nbrs[k]) slot_edge[base + k] = slot_edge[*g.slot(nbrs[k], u)];
      }
    }
  }

  // Orient each edge toward the endpoint with larger (degree, id) rank.
  auto higher = [&](NodeId a, NodeId b) {
    return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
  };
  std::vector<std::size_t> out_off(n + 1, 0);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) out_off[u + 1] += higher(u, v);
  }
  std::partial_sum(out_off.begin(), out_off.end(), out_off.begin());
  std::vector<NodeId> out_nbr(out_off.back());
  std::vector<std::uint32_t> out_edge(out_off.back());
  for (NodeId u = 0; u < n; ++u) {
    std::size_t w = out_off[u];
    auto base = g.offsets()[u];
    auto nbrs = g.neighbors(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (higher(u, nbrs[k])) {
        out_nbr[w] = nbrs[k];
        out_edge[w] = slot_edge[base + k];
        ++w;
      }
    }
  }

  std::vector<std::uint32_t> support(m, 0);
  std::vector<std::uint32_t> mark(n, 0);  // edge id + 1 of (u, x) for the current u
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t a = out_off[u]; a < out_off[u + 1]; ++a) mark[out_nbr[a]] = out_edge[a] + 1;
    for (std::size_t a = out_off[u]; a < out_off[u + 1]; ++a) {
      NodeId v = out_nbr[a];
      for (std::size_t b = out_off[v]; b < out_off[v + 1]; ++b) {
        NodeId w = out_nbr[b];
        if (mark[w]) {
          ++support[out_edge[a]];
          ++support[out_edge[b]];
          ++support[mark[w] - 1];
        }
      }
    }
    for (std::size_t a = out_off[u]; a < out_off[u + 1]; ++a) mark[out_nbr[a]] = 0;
  }

  BucketQueue queue(support);
  std::vector<char> removed(m, 0);
  result.truss.assign(m, 2);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const std::size_t e = queue.at(i);
    const std::uint32_t level = support[e];
    result.truss[e] = level + 2;
    removed[e] = 1;
    auto [u, v] = result.edges[e];
    if (g.degree(u) > g.degree(v)) std::swap(u, v);
    auto base = g.offsets()[u];
    auto nbrs = g.neighbors(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      NodeId w = nbrs[k];
      if (w == v) continue;
      const std::uint32_t e_uw = slot_edge[base + k];
      if (removed[e_uw]) continue;
      auto s = g.slot(v, w);
      if (!s) continue;
      const std::uint32_t e_vw = slot_edge[*s];
      if (removed[e_vw]) continue;
      if (support[e_uw] > level) queue.decrement(e_uw);
      if (support[e_vw] > level) queue.decrement(e_vw);
    }
  }
  return result;
}

std::vector<double> node_truss_numbers(const Graph& g, const EdgeTruss& et, bool subtract_floor) {
  if (et.edges.size() != g.edge_count()) throw std::invalid_argument("edge truss does not match graph");
  std::vector<double> sum(g.node_count(), 0.0);
  const double shift = subtract_floor ? 2.0 : 0.0;
  for (std::size_t e = 0; e < et.edges.size(); ++e) {
    const double t = static_cast<double>(et.truss[e]) - shift;
    sum[et.edges[e].first] += t;
    sum[et.edges[e].second] += t;
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    sum[v] = g.degree(v) ? sum[v] / static_cast<double>(g.degree(v)) : 0.0;
  }
  return sum;
}

std::vector<double> normalize(std::span<const double> raw) {
  if (raw.empty()) return {};
  auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo, range = *hi - *lo;
  std::vector<double> phi(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    phi[i] = range > 0.0 ? std::clamp((raw[i] - min) / range, 0.0, 1.0) : 0.5;
  }
  return phi;
}

DensityProfile density_profile(const Graph& g, DensityMetric metric, DensityOptions options) {
  DensityProfile p;
  p.metric = metric;
  switch (metric) {
    case DensityMetric::degree: {
      auto d = degrees(g);
      p.raw.assign(d.begin(), d.end());
      break;
    }
    case DensityMetric::core: {
      auto c = core_numbers(g);
      p.raw.assign(c.begin(), c.end());
      break;
    }
    case DensityMetric::truss:
      p.raw = node_truss_numbers(g, edge_truss_numbers(g), options.truss_offset);
      break;
  }
  p.phi = normalize(p.raw);
  return p;
}

}  // namespace decode
