#include "decode/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace decode {

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges) {
  std::vector<Edge> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count) {
      throw std::out_of_range("edge (" + std::to_string(u) + "," + std::to_string(v) +
                              ") outside node range " + std::to_string(node_count));
    }
    if (u == v) continue;
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  Graph g;
  g.offsets_.assign(node_count + 1, 0);
  g.neighbors_.resize(arcs.size());
  for (auto [u, v] : arcs) ++g.offsets_[u + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  for (std::size_t i = 0; i < arcs.size(); ++i) g.neighbors_[i] = arcs[i].second;
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept { return slot(u, v).has_value(); }

std::optional<std::size_t> Graph::slot(NodeId u, NodeId v) const noexcept {
  if (u >= node_count()) return std::nullopt;
  auto nbrs = neighbors(u);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return std::nullopt;
  return offsets_[u] + static_cast<std::size_t>(it - nbrs.begin());
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

const Matrix& Graph::features() const {
  if (!features_) throw std::logic_error("graph has no node features");
  return *features_;
}

void Graph::set_features(Matrix features) {
  if (static_cast<std::size_t>(features.rows()) != node_count()) {
    throw std::invalid_argument("feature rows (" + std::to_string(features.rows()) +
                                ") do not match node count (" + std::to_string(node_count()) + ")");
  }
  features_ = std::move(features);
}

void Graph::set_original_ids(std::vector<std::int64_t> ids) {
  if (!ids.empty() && ids.size() != node_count()) {
    throw std::invalid_argument("original id map size does not match node count");
  }
  original_ids_ = std::move(ids);
}

std::string Graph::check_invariants() const {
  const std::size_t n = node_count();
  if (offsets_.front() != 0 || offsets_.back() != neighbors_.size()) return "offsets do not span adjacency";
  for (NodeId v = 0; v < n; ++v) {
    if (offsets_[v] > offsets_[v + 1]) return "offsets not monotone at node " + std::to_string(v);
    auto nbrs = neighbors(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      NodeId u = nbrs[i];
      if (u >= n) return "neighbor id out of range at node " + std::to_string(v);
      if (u == v) return "self-loop at node " + std::to_string(v);
      if (i > 0 && nbrs[i - 1] >= u) return "unsorted or duplicate neighbors at node " + std::to_string(v);
      if (!has_edge(u, v)) {
        return "asymmetric edge " + std::to_string(v) + "->" + std::to_string(u);
      }
    }
  }
  if (features_ && static_cast<std::size_t>(features_->rows()) != n) return "feature rows mismatch";
  return {};
}

Graph Graph::permuted(std::span<const NodeId> perm) const {
  const std::size_t n = node_count();
  if (perm.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<Edge> mapped;
  mapped.reserve(edge_count());
  for (auto [u, v] : edges()) mapped.emplace_back(perm[u], perm[v]);
  Graph g = from_edges(n, mapped);
  if (features_) {
    Matrix f(features_->rows(), features_->cols());
    for (std::size_t v = 0; v < n; ++v) f.row(perm[v]) = features_->row(static_cast<Eigen::Index>(v));
    g.features_ = std::move(f);
  }
  if (!original_ids_.empty()) {
    std::vector<std::int64_t> ids(n);
    for (std::size_t v = 0; v < n; ++v) ids[perm[v]] = original_ids_[v];
    g.original_ids_ = std::move(ids);
  }
  return g;
}

namespace {
template <typename T>
void append_raw(std::string& out, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}
}  // namespace

std::string Graph::canonical_bytes() const {
  std::string out;
  append_raw(out, static_cast<std::uint64_t>(node_count()));
  for (auto o : offsets_) append_raw(out, static_cast<std::uint64_t>(o));
  for (auto v : neighbors_) append_raw(out, v);
  append_raw(out, static_cast<std::uint64_t>(feature_dim()));
  if (features_) {
    for (Eigen::Index i = 0; i < features_->size(); ++i) append_raw(out, features_->data()[i]);
  }
  return out;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.offsets_ != b.offsets_ || a.neighbors_ != b.neighbors_) return false;
  if (a.original_ids_ != b.original_ids_) return false;
  if (a.features_.has_value() != b.features_.has_value()) return false;
  if (a.features_ && *a.features_ != *b.features_) return false;
  return true;
}

const char* to_string(Split s) noexcept {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

std::vector<std::size_t> LabeledGraphSet::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == s) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> LabeledGraphSet::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (int y : labels) ++counts.at(static_cast<std::size_t>(y));
  return counts;
}

void LabeledGraphSet::validate() const {
  if (graphs.size() != labels.size() || graphs.size() != splits.size() || graphs.size() != ids.size()) {
    throw std::logic_error("labeled graph set: graphs, labels, splits and ids differ in length");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_names.size()) {
      throw std::logic_error("labeled graph set: label " + std::to_string(y) + " out of range");
    }
  }
}

LabeledGraphSet stratified_split(const LabeledGraphSet& set, SplitFractions fractions, std::uint64_t seed) {
  const double f[3] = {fractions.train, fractions.val, fractions.test};
  for (double x : f) {
    if (!(x > 0.0)) throw std::invalid_argument("split fractions must be positive");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }

  std::vector<std::vector<std::size_t>> by_class(set.num_classes());
  for (std::size_t i = 0; i < set.size(); ++i) by_class.at(static_cast<std::size_t>(set.labels[i])).push_back(i);

  LabeledGraphSet out = set;
  out.splits.assign(set.size(), Split::train);
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    const std::size_t n = members.size();
    if (n < 3) {
      throw std::invalid_argument("class '" + set.class_names[c] + "' has " + std::to_string(n) +
                                  " graphs, fewer than the 3 splits");
    }
    std::shuffle(members.begin(), members.end(), rng);

    // Largest-remainder apportionment, then guarantee one graph per split.
    std::size_t counts[3];
    double rema[3];
    std::size_t assigned = 0;
    for (int s = 0; s < 3; ++s) {
      double exact = f[s] * static_cast<double>(n);
      counts[s] = static_cast<std::size_t>(std::floor(exact));
      rema[s] = exact - static_cast<double>(counts[s]);
      assigned += counts[s];
    }
    while (assigned < n) {
      int best = 0;
      for (int s = 1; s < 3; ++s) {
        if (rema[s] > rema[best]) best = s;
      }
      ++counts[best];
      rema[best] = -1.0;
      ++assigned;
    }
    for (int s = 0; s < 3; ++s) {
      while (counts[s] == 0) {
        int donor = static_cast<int>(std::max_element(counts, counts + 3) - counts);
        --counts[donor];
        ++counts[s];
      }
    }
    std::size_t pos = 0;
    for (int s = 0; s < 3; ++s) {
      for (std::size_t k = 0; k < counts[s]; ++k) out.splits[members[pos++]] = static_cast<Split>(s);
    }
  }
  return out;
}

}  // namespace decode
