#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "decode/dataset.hpp"
#include "decode/errors.hpp"
#include "decode/generator.hpp"
#include "decode/io.hpp"

using namespace decode;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("decode_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST(Dataset, LoadsSingleGraphWithSymmetrization) {
  auto root = fresh_dir("single");
  write(root / "labels.json", R"({"g1": "campaign"})");
  write(root / "g1" / "edges.tsv", "0\t1\n1\t0\n2\t2\n");
  auto set = load_dataset(root);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.graphs[0].node_count(), 3u);
  EXPECT_EQ(set.graphs[0].edge_count(), 1u);
  EXPECT_FALSE(set.graphs[0].has_features());
}

TEST(Dataset, EmptyDirectoryHasNoGraphs) {
  auto root = fresh_dir("empty");
  try {
    load_dataset(root);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no graphs found"), std::string::npos);
  }
}

TEST(Dataset, MissingLabelNamesGraph) {
  auto root = fresh_dir("nolabel");
  write(root / "labels.json", R"({"g1": "a"})");
  write(root / "g1" / "edges.tsv", "0\t1\n");
  write(root / "g2" / "edges.tsv", "0\t1\n");
  try {
    load_dataset(root);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("g2"), std::string::npos);
  }
}

TEST(Dataset, MalformedEdgeLineReportsFileAndLine) {
  auto root = fresh_dir("malformed");
  write(root / "labels.json", R"({"g1": "a"})");
  write(root / "g1" / "edges.tsv", "0\t1\nfoo\n");
  try {
    load_dataset(root);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("edges.tsv:2"), std::string::npos) << e.what();
  }
}

TEST(Dataset, EdgeNodeMissingFromFeaturesIsError) {
  auto root = fresh_dir("features");
  write(root / "labels.json", R"({"g1": "a"})");
  write(root / "g1" / "edges.tsv", "0\t1\n1\t7\n");
  write(root / "g1" / "features.csv", "node_id,f0\n0,1.5\n1,2.5\n");
  EXPECT_THROW(load_dataset(root), DataError);
}

TEST(Dataset, FeaturesFollowRemappedIds) {
  auto root = fresh_dir("remap");
  write(root / "labels.json", R"({"g1": "a"})");
  write(root / "g1" / "edges.tsv", "10\t30\n30\t20\n");
  write(root / "g1" / "features.csv", "node_id,f0\n30,3\n10,1\n20,2\n");
  auto g = load_dataset(root).graphs[0];
  ASSERT_TRUE(g.has_features());
  EXPECT_DOUBLE_EQ(g.features()(0, 0), 1);
  EXPECT_DOUBLE_EQ(g.features()(2, 0), 3);
  EXPECT_TRUE(g.has_edge(0, 2));
  EXPECT_TRUE(g.has_edge(2, 1));
}

TEST(Dataset, WriteLoadRoundTripIsIdempotent) {
  GeneratorConfig cfg;
  cfg.n_graphs_per_class = 4;
  auto root = fresh_dir("roundtrip");
  write_dataset(generate_synthetic(cfg), root);
  auto a = load_dataset(root), b = load_dataset(root, 3);
  ASSERT_EQ(a.size(), 8u);
  EXPECT_EQ(a.ids, b.ids);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a.graphs[i] == b.graphs[i]);
  auto orig = generate_synthetic(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.graphs[i].edge_count(), orig.graphs[i].edge_count());
    EXPECT_EQ(a.graphs[i].features(), orig.graphs[i].features());
  }
}

TEST(Dataset, ValidateCollectsEveryIssue) {
  auto root = fresh_dir("issues");
  write(root / "labels.json", R"({"g1": "a", "g3": "b"})");
  write(root / "g1" / "edges.tsv", "0\tx\n");
  write(root / "g2" / "edges.tsv", "0\t1\n");
  auto summary = validate_dataset(root);
  EXPECT_GE(summary.issues.size(), 3u);
}

TEST(Dataset, DeriveTaskFromHierarchicalNames) {
  LabeledGraphSet s;
  s.class_names = {"campaign/news", "campaign/politics", "noncampaign/news", "noncampaign/sports"};
  for (int c = 0; c < 4; ++c) {
    s.ids.push_back("g" + std::to_string(c));
    s.graphs.push_back(Graph::from_edges(1, {}));
    s.labels.push_back(c);
    s.splits.push_back(Split::train);
  }
  auto bin = derive_task(s, Task::binary);
  EXPECT_EQ(bin.class_names, (std::vector<std::string>{"campaign", "noncampaign"}));
  EXPECT_EQ(bin.labels, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(positive_class_index(bin), 0);
  auto multi = derive_task(s, Task::multiclass);
  EXPECT_EQ(multi.size(), 2u);
  EXPECT_EQ(multi.class_names, (std::vector<std::string>{"news", "politics"}));
  auto news = derive_task(s, Task::news_binary);
  EXPECT_EQ(news.ids, (std::vector<std::string>{"g0", "g2"}));
}
