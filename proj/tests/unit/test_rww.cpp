#include <gtest/gtest.h>

#include <cmath>

#include "decode/density.hpp"
#include "decode/errors.hpp"
#include "decode/generator.hpp"
#include "decode/rww.hpp"

using namespace decode;

namespace {

DensityProfile with_phi(std::vector<double> phi) {
  DensityProfile p;
  p.raw = phi;
  p.phi = std::move(phi);
  return p;
}

Graph barbell() {
  std::vector<Edge> e;
  for (NodeId a = 0; a < 5; ++a)
    for (NodeId b = a + 1; b < 5; ++b) {
      e.push_back({a, b});
      e.push_back({a + 7, b + 7});
    }
  e.push_back({4, 5});
  e.push_back({5, 6});
  e.push_back({6, 7});
  return Graph::from_edges(12, e);
}

}  // namespace

TEST(Threshold, Rules) {
  auto p = with_phi({0, 0.25, 0.5, 0.75, 1.0});
  EXPECT_DOUBLE_EQ(resolve_threshold(p, ThresholdRule::median), 0.5);
  EXPECT_DOUBLE_EQ(resolve_threshold(p, ThresholdRule::midpoint), 0.5);
  EXPECT_DOUBLE_EQ(resolve_threshold(with_phi({0.1, 0.2}), ThresholdRule::fixed_half), 0.5);
  EXPECT_DOUBLE_EQ(resolve_threshold(with_phi({0.1, 0.2, 0.6, 0.9}), ThresholdRule::median), 0.4);
  EXPECT_DOUBLE_EQ(resolve_threshold(with_phi({0.2, 0.3, 0.6}), ThresholdRule::midpoint), 0.4);
  EXPECT_EQ(parse_threshold_rule("0.5"), ThresholdRule::fixed_half);
  EXPECT_EQ(parse_threshold_rule("mid"), ThresholdRule::midpoint);
}

TEST(Transition, HighAndLowBranches) {
  Graph g = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {0, 2}});
  auto dist = transition_distribution(g, with_phi({0.9, 0.2, 0.8}), 0, 0.5);
  EXPECT_DOUBLE_EQ(dist[0], 0.2);
  EXPECT_DOUBLE_EQ(dist[1], 0.8);
  dist = transition_distribution(g, with_phi({0.3, 0.2, 0.8}), 0, 0.5);
  EXPECT_DOUBLE_EQ(dist[0], 0.8);
  EXPECT_DOUBLE_EQ(dist[1], 0.2);
  dist = transition_distribution(g, with_phi({0.5, 0.2, 0.8}), 0, 0.5);  // equality takes the low branch
  EXPECT_DOUBLE_EQ(dist[0], 0.8);
  dist = transition_distribution(g, with_phi({0.9, 0.0, 0.0}), 0, 0.5);
  EXPECT_DOUBLE_EQ(dist[0], 0.5);
  EXPECT_DOUBLE_EQ(dist[1], 0.5);
}

TEST(Transition, IsolatedNodeThrows) {
  Graph g = Graph::from_edges(2, {});
  EXPECT_THROW(transition_distribution(g, with_phi({0.5, 0.5}), 0, 0.5), std::invalid_argument);
}

TEST(Walks, ForcedPathAndIsolatedSeed) {
  Graph g = Graph::from_edges(3, std::vector<Edge>{{0, 1}});
  WalkConfig cfg;
  cfg.walk_length = 3;
  auto c = generate_walks(g, density_profile(g, DensityMetric::degree), cfg);
  ASSERT_EQ(c.size(), 3u);
  auto w0 = c.walk(0);
  EXPECT_EQ(std::vector<NodeId>(w0.begin(), w0.end()), (std::vector<NodeId>{0, 1, 0, 1}));
  auto w2 = c.walk(2);
  EXPECT_EQ(std::vector<NodeId>(w2.begin(), w2.end()), (std::vector<NodeId>{2}));
}

TEST(Walks, EdgeValidityLengthAndDeterminism) {
  Graph g = erdos_renyi(60, 0.08, 3);
  auto prof = density_profile(g, DensityMetric::core);
  WalkConfig cfg;
  cfg.walks_per_node = 3;
  cfg.threshold_rule = ThresholdRule::median;
  cfg.seed = 17;
  auto c = generate_walks(g, prof, cfg);
  ASSERT_EQ(c.size(), 180u);
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto w = c.walk(i);
    EXPECT_EQ(w[0], i / 3);
    EXPECT_LE(w.size(), cfg.walk_length + 1);
    for (std::size_t k = 1; k < w.size(); ++k) EXPECT_TRUE(g.has_edge(w[k - 1], w[k]));
  }
  EXPECT_EQ(c, generate_walks(g, prof, cfg, 4));
  EXPECT_EQ(format_walks(c), format_walks(generate_walks(g, prof, cfg)));
  auto parsed = parse_walks(format_walks(c));
  EXPECT_EQ(parsed.tokens, c.tokens);
  EXPECT_EQ(parsed.offsets, c.offsets);
}

TEST(Walks, StarFirstStepWithinBinomialBound) {
  Graph g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto prof = density_profile(g, DensityMetric::degree);
  TransitionTable table(g, prof, 0.5);
  std::array<int, 5> hits{};
  for (std::size_t i = 0; i < 10000; ++i) {
    auto rng = walk_stream(99, 0, i);
    ++hits[table.sample(0, rng)];
  }
  const double sigma = std::sqrt(10000 * 0.25 * 0.75);
  for (int leaf = 1; leaf <= 4; ++leaf) EXPECT_LE(std::abs(hits[leaf] - 2500.0), 3 * sigma);
}

TEST(Walks, DenseStartsPreferDenseRegions) {
  Graph g = barbell();
  auto prof = density_profile(g, DensityMetric::degree);
  WalkConfig cfg;
  cfg.threshold_rule = ThresholdRule::median;
  cfg.walk_length = 30;
  cfg.walks_per_node = 20;
  auto c = generate_walks(g, prof, cfg);
  double visited = 0, count = 0, overall = 0;
  for (double p : prof.phi) overall += p;
  overall /= static_cast<double>(prof.phi.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto w = c.walk(i);
    if (w[0] >= 4 && w[0] <= 7) continue;  // bridge and bridge endpoints
    for (auto v : w) {
      visited += prof.phi[v];
      ++count;
    }
  }
  EXPECT_GT(visited / count, overall);
}

TEST(Walks, ParseRejectsGarbage) { EXPECT_THROW(parse_walks("1 2 x\n"), DataError); }
