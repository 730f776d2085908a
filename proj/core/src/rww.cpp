#include "decode/rww.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "decode/errors.hpp"
#include "decode/parallel.hpp"

namespace decode {

ThresholdRule parse_threshold_rule(const std::string& s) {
  if (s == "fixed_half" || s == "0.5") return ThresholdRule::fixed_half;
  if (s == "median") return ThresholdRule::median;
  if (s == "midpoint" || s == "mid") return ThresholdRule::midpoint;
  throw ConfigError("unknown threshold rule '" + s + "' (expected fixed_half|median|midpoint)");
}

const char* to_string(ThresholdRule r) noexcept {
  switch (r) {
    case ThresholdRule::fixed_half: return "fixed_half";
    case ThresholdRule::median: return "median";
    case ThresholdRule::midpoint: return "midpoint";
  }
  return "?";
}

void WalkCorpus::add(std::span<const NodeId> w) {
  tokens.insert(tokens.end(), w.begin(), w.end());
  offsets.push_back(tokens.size());
}

double resolve_threshold(const DensityProfile& profile, ThresholdRule rule) {
  const auto& phi = profile.phi;
  if (phi.empty()) throw std::invalid_argument("empty density profile");
  switch (rule) {
    case ThresholdRule::fixed_half:
      return 0.5;
    case ThresholdRule::median: {
      std::vector<double> s = phi;
      std::sort(s.begin(), s.end());
      const std::size_t n = s.size();
      return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    }
    case ThresholdRule::midpoint: {
      auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
      return 0.5 * (*lo + *hi);
    }
  }
  return 0.5;
}

std::vector<double> transition_distribution(const Graph& g, const DensityProfile& profile, NodeId v, double tau) {
  auto nbrs = g.neighbors(v);
  if (nbrs.empty()) throw std::invalid_argument("node " + std::to_string(v) + " has no neighbors");
  const bool dense = profile.phi[v] > tau;
  std::vector<double> w(nbrs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    w[k] = dense ? profile.phi[nbrs[k]] : 1.0 - profile.phi[nbrs[k]];
    total += w[k];
  }
  if (total <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(nbrs.size()));
    return w;
  }
  for (double& x : w) x /= total;
  return w;
}

TransitionTable::TransitionTable(const Graph& g, const DensityProfile& profile, double tau)
    : graph_(&g), cumulative_(g.adjacency().size()) {
  if (profile.phi.size() != g.node_count()) throw std::invalid_argument("density profile does not match graph");
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) continue;
    auto p = transition_distribution(g, profile, v, tau);
    double acc = 0.0;
    const std::size_t base = g.offsets()[v];
    for (std::size_t k = 0; k < p.size(); ++k) {
      acc += p[k];
      cumulative_[base + k] = acc;
    }
    cumulative_[base + p.size() - 1] = 1.0;
  }
}

NodeId TransitionTable::next(NodeId v, double u) const {
  const std::size_t lo = graph_->offsets()[v], hi = graph_->offsets()[v + 1];
  auto begin = cumulative_.begin() + static_cast<std::ptrdiff_t>(lo);
  auto end = cumulative_.begin() + static_cast<std::ptrdiff_t>(hi);
  auto it = std::upper_bound(begin, end, u);
  if (it == end) --it;
  return graph_->adjacency()[lo + static_cast<std::size_t>(it - begin)];
}

std::mt19937_64 walk_stream(std::uint64_t seed, NodeId node, std::size_t walk_index) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return std::mt19937_64(mix(mix(seed) ^ mix((static_cast<std::uint64_t>(node) << 24) ^ walk_index)));
}

WalkCorpus generate_walks(const Graph& g, const DensityProfile& profile, const WalkConfig& cfg, std::size_t jobs) {
  if (cfg.walk_length < 1 || cfg.walks_per_node < 1) throw std::invalid_argument("walk_length and walks_per_node must be >= 1");
  const double tau = resolve_threshold(profile, cfg.threshold_rule);
  const TransitionTable table(g, profile, tau);
  const std::size_t n = g.node_count();
  std::vector<std::vector<NodeId>> per_node(n);
  parallel_for(n, jobs, [&](std::size_t vi) {
    auto& out = per_node[vi];
    out.reserve(cfg.walks_per_node * (cfg.walk_length + 1) + 1);
    for (std::size_t r = 0; r < cfg.walks_per_node; ++r) {
      auto rng = walk_stream(cfg.seed, static_cast<NodeId>(vi), r);
      NodeId cur = static_cast<NodeId>(vi);
      out.push_back(cur);
      for (std::size_t t = 0; t < cfg.walk_length && g.degree(cur) > 0; ++t) {
        cur = table.sample(cur, rng);
        out.push_back(cur);
      }
      out.push_back(static_cast<NodeId>(-1));  // walk separator
    }
  });
  WalkCorpus corpus;
  for (const auto& chunk : per_node) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (chunk[i] == static_cast<NodeId>(-1)) {
        corpus.add(std::span<const NodeId>(chunk.data() + start, i - start));
        start = i + 1;
      }
    }
  }
  return corpus;
}

std::string format_walks(const WalkCorpus& corpus) {
  std::string out;
  out.reserve(corpus.tokens.size() * 6);
  char buf[16];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto w = corpus.walk(i);
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (k) out += ' ';
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, w[k]);
      out.append(buf, p);
    }
    out += '\n';
  }
  return out;
}

WalkCorpus parse_walks(std::string_view text) {
  WalkCorpus corpus;
  std::vector<NodeId> walk;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto end = text.find('\n');
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(0, end);
    text.remove_prefix(std::min(end + 1, text.size()));
    ++line_no;
    walk.clear();
    const char* p = line.data();
    const char* stop = line.data() + line.size();
    while (p < stop) {
      while (p < stop && *p == ' ') ++p;
      if (p == stop) break;
      NodeId id = 0;
      auto [q, ec] = std::from_chars(p, stop, id);
      if (ec != std::errc{} || (q < stop && *q != ' ')) {
        throw DataError("walk line " + std::to_string(line_no) + ": malformed node id");
      }
      walk.push_back(id);
      p = q;
    }
    if (walk.empty()) throw DataError("walk line " + std::to_string(line_no) + ": empty walk");
    corpus.add(walk);
  }
  return corpus;
}

}  // namespace decode
