#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "decode/density.hpp"
#include "decode/rww.hpp"
#include "decode/sgns.hpp"

using namespace decode;

namespace {

WalkCorpus corpus_of(std::vector<std::vector<NodeId>> walks) {
  WalkCorpus c;
  for (const auto& w : walks) c.add(w);
  return c;
}

double cosine(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  return m.row(a).dot(m.row(b)) / (m.row(a).norm() * m.row(b).norm());
}

Graph barbell() {
  std::vector<Edge> e;
  for (NodeId a = 0; a < 5; ++a)
    for (NodeId b = a + 1; b < 5; ++b) {
      e.push_back({a, b});
      e.push_back({a + 5, b + 5});
    }
  e.push_back({4, 5});
  return Graph::from_edges(10, e);
}

}  // namespace

TEST(Pairs, WindowAndTruncation) {
  auto pairs = extract_pairs(corpus_of({{0, 1, 2, 3, 4}}), 2);
  std::vector<NodeId> ctx;
  for (auto [c, x] : pairs)
    if (c == 2) ctx.push_back(x);
  std::sort(ctx.begin(), ctx.end());
  EXPECT_EQ(ctx, (std::vector<NodeId>{0, 1, 3, 4}));
  auto two = extract_pairs(corpus_of({{0, 1}}), 2);
  EXPECT_EQ(two, (std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 0}}));
  EXPECT_TRUE(extract_pairs(corpus_of({{3}}), 2).empty());
}

TEST(Pairs, CountFormula) {
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t n = 2 * r + 1; n < 20; ++n) {
      std::vector<NodeId> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<NodeId>(i);
      EXPECT_EQ(extract_pairs(corpus_of({w}), r).size(), 2 * (r * n - r * (r + 1) / 2));
    }
  }
}

TEST(Loss, PositiveTermAtZeroIsLn2) {
  Matrix in = Matrix::Zero(2, 3), ctx = Matrix::Zero(2, 3);
  std::vector<SgnsExample> ex{{0, 1, {}}};
  EXPECT_NEAR(sgns_loss(in, ctx, ex), std::log(2.0), 1e-15);
  EXPECT_NEAR(neg_log_sigmoid(0.0), 0.6931471805599453, 1e-15);
}

TEST(Loss, ZeroInputGradientIsHalfPairedVector) {
  Matrix in = Matrix::Zero(2, 3), ctx = Matrix::Zero(2, 3);
  ctx.row(1) << 0.3, -1.2, 2.0;
  std::vector<SgnsExample> ex{{0, 1, {}}};
  Matrix gi, gc;
  sgns_loss_and_gradient(in, ctx, ex, gi, gc);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(gi(0, k), -0.5 * ctx(1, k), 1e-15);
  EXPECT_EQ(gc.norm(), 0.0);
}

TEST(Loss, NegativeEqualToContext) {
  Matrix in(2, 2), ctx(2, 2);
  in << 0.4, -0.1, 0, 0;
  ctx << 0, 0, 0.7, 0.2;
  std::vector<SgnsExample> ex{{0, 1, {1}}};
  const double s = in.row(0).dot(ctx.row(1));
  const double sig = 1 / (1 + std::exp(-s));
  EXPECT_NEAR(sgns_loss(in, ctx, ex), std::log1p(std::exp(-s)) + std::log1p(std::exp(s)), 1e-14);
  Matrix gi, gc;
  sgns_loss_and_gradient(in, ctx, ex, gi, gc);
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(gi(0, k), (2 * sig - 1) * ctx(1, k), 1e-14);
    EXPECT_NEAR(gc(1, k), (2 * sig - 1) * in(0, k), 1e-14);
  }
}

TEST(Loss, GradientCheck) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int t = 0; t < 5; ++t) {
    Matrix in(6, 8), ctx(6, 8);
    for (Eigen::Index k = 0; k < in.size(); ++k) {
      in.data()[k] = u(rng);
      ctx.data()[k] = u(rng);
    }
    std::vector<SgnsExample> ex;
    for (int p = 0; p < 20; ++p) ex.push_back({static_cast<NodeId>(rng() % 6), static_cast<NodeId>(rng() % 6),
                                               {static_cast<NodeId>(rng() % 6), static_cast<NodeId>(rng() % 6)}});
    EXPECT_LT(gradient_check_sgns(in, ctx, ex), 1e-6);
  }
}

TEST(Train, Errors) {
  SgnsConfig cfg;
  EXPECT_THROW(train_sgns(corpus_of({{0, 5}}), 3, cfg), std::invalid_argument);
  try {
    train_sgns(corpus_of({{0}, {1}}), 2, cfg);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("corpus too short"), std::string::npos);
  }
}

TEST(Train, DeterministicFiniteAndDescending) {
  Graph g = barbell();
  auto corpus = generate_walks(g, density_profile(g, DensityMetric::degree), {.walk_length = 40, .walks_per_node = 5});
  SgnsConfig cfg;
  cfg.dim = 16;
  auto a = train_sgns(corpus, g.node_count(), cfg), b = train_sgns(corpus, g.node_count(), cfg);
  EXPECT_TRUE(a.rows == b.rows);
  EXPECT_TRUE(a.rows.allFinite());
  EXPECT_EQ(a.rows.rows(), 10);
  ASSERT_EQ(a.epoch_loss.size(), cfg.epochs);
  EXPECT_LT(a.epoch_loss.back(), a.epoch_loss.front());
}

TEST(Train, BarbellCliquesSeparate) {
  Graph g = barbell();
  for (std::uint64_t seed : {1, 2, 3}) {
    WalkConfig wc;
    wc.walks_per_node = 10;
    wc.seed = seed;
    auto corpus = generate_walks(g, density_profile(g, DensityMetric::degree), wc);
    SgnsConfig cfg;
    cfg.dim = 16;
    cfg.seed = seed;
    auto emb = train_sgns(corpus, g.node_count(), cfg).rows;
    double intra = 0, inter = 0;
    int ni = 0, nx = 0;
    for (int a = 0; a < 10; ++a)
      for (int b = a + 1; b < 10; ++b) {
        if ((a < 5) == (b < 5)) {
          intra += cosine(emb, a, b);
          ++ni;
        } else {
          inter += cosine(emb, a, b);
          ++nx;
        }
      }
    EXPECT_GT(intra / ni, inter / nx) << "seed " << seed;
  }
}

TEST(Train, HogwildModeStaysFinite) {
  Graph g = barbell();
  auto corpus = generate_walks(g, density_profile(g, DensityMetric::degree), {.walks_per_node = 4});
  SgnsConfig cfg;
  cfg.dim = 8;
  cfg.threads = 3;
  EXPECT_TRUE(train_sgns(corpus, g.node_count(), cfg).rows.allFinite());
}

TEST(Format, EmbeddingRoundTrip) {
  Matrix m(2, 3);
  m << 0.1, -2.5e-7, 3, 1.0 / 3.0, 0, -1;
  EXPECT_EQ(format_embedding(m).substr(0, 4), "2 3\n");
  EXPECT_TRUE(parse_embedding(format_embedding(m)) == m);
}
