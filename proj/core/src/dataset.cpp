#include "decode/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "decode/errors.hpp"
#include "decode/io.hpp"
#include "decode/parallel.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace decode {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Splits on runs of tabs/spaces.
std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == '\t' || line[i] == ' ')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != '\t' && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    fn(trim(std::string_view(text).substr(start, end - start)), line_no);
    if (end == text.size()) break;
    start = end + 1;
  }
}

struct RawFeatures {
  std::vector<std::int64_t> ids;
  Matrix values;
};

RawFeatures read_features(const fs::path& path) {
  std::string text = read_file(path);
  RawFeatures raw;
  std::size_t dim = 0;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    auto cols = split(line, ',');
    if (!header_seen) {
      if (cols.empty() || cols[0] != "node_id") {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": header must start with node_id");
      }
      dim = cols.size() - 1;
      header_seen = true;
      return;
    }
    if (cols.size() != dim + 1) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) +
                      " columns, got " + std::to_string(cols.size()));
    }
    std::int64_t id = 0;
    if (!parse_number(cols[0], id)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed node id");
    }
    std::vector<double> row(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_number(cols[k + 1], row[k])) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed feature value");
      }
    }
    raw.ids.push_back(id);
    rows.push_back(std::move(row));
  });
  if (!header_seen) throw DataError(path.string() + ": empty features file");
  raw.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < dim; ++k) raw.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
  }
  return raw;
}

Graph read_graph(const fs::path& dir) {
  const fs::path edges_path = dir / "edges.tsv";
  std::string text = read_file(edges_path);
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    auto cols = split_ws(line);
    std::pair<std::int64_t, std::int64_t> e;
    if (cols.size() != 2 || !parse_number(cols[0], e.first) || !parse_number(cols[1], e.second)) {
      throw DataError(edges_path.string() + ":" + std::to_string(line_no) + ": malformed edge line '" +
                      std::string(line) + "'");
    }
    raw_edges.push_back(e);
  });

  std::vector<std::int64_t> ids;
  ids.reserve(raw_edges.size() * 2);
  for (auto [a, b] : raw_edges) {
    ids.push_back(a);
    ids.push_back(b);
  }

  std::optional<RawFeatures> features;
  const fs::path features_path = dir / "features.csv";
  if (fs::exists(features_path)) {
    features = read_features(features_path);
    std::vector<std::int64_t> known = features->ids;
    std::sort(known.begin(), known.end());
    if (std::adjacent_find(known.begin(), known.end()) != known.end()) {
      throw DataError(features_path.string() + ": duplicate node id");
    }
    for (auto id : ids) {
      if (!std::binary_search(known.begin(), known.end(), id)) {
        throw DataError(edges_path.string() + ": node " + std::to_string(id) + " absent from " +
                        features_path.string());
      }
    }
    ids = std::move(known);
  } else {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }

  auto index_of = [&](std::int64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw_edges.size());
  for (auto [a, b] : raw_edges) edges.emplace_back(index_of(a), index_of(b));

  Graph g = Graph::from_edges(ids.size(), edges);
  if (features) {
    Matrix f(static_cast<Eigen::Index>(ids.size()), features->values.cols());
    for (std::size_t r = 0; r < features->ids.size(); ++r) {
      f.row(index_of(features->ids[r])) = features->values.row(static_cast<Eigen::Index>(r));
    }
    g.set_features(std::move(f));
  }
  g.set_original_ids(std::move(ids));
  return g;
}

std::vector<std::string> graph_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("dataset root " + root.string() + " is not a directory");
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "edges.tsv")) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, std::string> read_labels(const fs::path& root) {
  const fs::path path = root / "labels.json";
  if (!fs::exists(path)) throw DataError("missing " + path.string());
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(path.string() + ": expected an object mapping graph id to class name");
  std::map<std::string, std::string> labels;
  for (auto& [key, value] : j.items()) {
    if (!value.is_string()) throw DataError(path.string() + ": label for '" + key + "' is not a string");
    labels[key] = value.get<std::string>();
  }
  return labels;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

LabeledGraphSet load_dataset(const fs::path& root, std::size_t jobs) {
  auto dirs = graph_dirs(root);
  if (dirs.empty()) throw DataError("no graphs found under " + root.string());
  auto labels = read_labels(root);
  for (const auto& id : dirs) {
    if (!labels.count(id)) throw DataError("missing label for graph '" + id + "'");
  }
  for (const auto& [id, name] : labels) {
    if (!std::binary_search(dirs.begin(), dirs.end(), id)) {
      throw DataError("label for graph '" + id + "' has no edges file");
    }
  }

  LabeledGraphSet set;
  std::set<std::string> names;
  for (const auto& id : dirs) names.insert(labels[id]);
  set.class_names.assign(names.begin(), names.end());
  set.ids = dirs;
  set.graphs.resize(dirs.size());
  parallel_for(dirs.size(), jobs, [&](std::size_t i) { set.graphs[i] = read_graph(root / dirs[i]); });
  for (const auto& id : dirs) {
    auto it = std::lower_bound(set.class_names.begin(), set.class_names.end(), labels[id]);
    set.labels.push_back(static_cast<int>(it - set.class_names.begin()));
  }
  set.splits.assign(dirs.size(), Split::train);
  return set;
}

void write_dataset(const LabeledGraphSet& set, const fs::path& root) {
  set.validate();
  fs::create_directories(root);
  json labels = json::object();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Graph& g = set.graphs[i];
    labels[set.ids[i]] = set.class_names[static_cast<std::size_t>(set.labels[i])];
    auto original = [&](NodeId v) -> std::int64_t {
      return g.original_ids().empty() ? static_cast<std::int64_t>(v) : g.original_ids()[v];
    };
    std::string edges;
    for (auto [u, v] : g.edges()) {
      edges += std::to_string(original(u));
      edges += '\t';
      edges += std::to_string(original(v));
      edges += '\n';
    }
    const fs::path dir = root / set.ids[i];
    write_file_atomic(dir / "edges.tsv", edges);
    if (g.has_features()) {
      std::string csv = "node_id";
      for (std::size_t k = 0; k < g.feature_dim(); ++k) csv += ",f" + std::to_string(k);
      csv += '\n';
      const Matrix& f = g.features();
      for (NodeId v = 0; v < g.node_count(); ++v) {
        csv += std::to_string(original(v));
        for (Eigen::Index k = 0; k < f.cols(); ++k) csv += "," + format_double(f(v, k));
        csv += '\n';
      }
      write_file_atomic(dir / "features.csv", csv);
    }
  }
  write_file_atomic(root / "labels.json", labels.dump(2) + "\n");
}

Task parse_task(const std::string& s) {
  if (s == "binary") return Task::binary;
  if (s == "multiclass") return Task::multiclass;
  if (s == "news_binary") return Task::news_binary;
  throw ConfigError("unknown task '" + s + "' (expected binary|multiclass|news_binary)");
}

const char* to_string(Task t) noexcept {
  switch (t) {
    case Task::binary: return "binary";
    case Task::multiclass: return "multiclass";
    case Task::news_binary: return "news_binary";
  }
  return "?";
}

LabeledGraphSet derive_task(const LabeledGraphSet& set, Task task) {
  auto top = [](const std::string& name) { return name.substr(0, name.find('/')); };
  auto sub = [](const std::string& name) {
    auto pos = name.find('/');
    return pos == std::string::npos ? std::string{} : name.substr(pos + 1);
  };
  bool hierarchical = std::any_of(set.class_names.begin(), set.class_names.end(),
                                  [](const std::string& n) { return n.find('/') != std::string::npos; });
  if (!hierarchical) return set;

  std::vector<std::size_t> keep;
  std::vector<std::string> new_names;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string& name = set.class_names[static_cast<std::size_t>(set.labels[i])];
    switch (task) {
      case Task::binary:
        keep.push_back(i);
        new_names.push_back(top(name));
        break;
      case Task::multiclass:
        if (lower(top(name)) == "campaign") {
          keep.push_back(i);
          new_names.push_back(sub(name).empty() ? name : sub(name));
        }
        break;
      case Task::news_binary:
        if (lower(sub(name)) == "news") {
          keep.push_back(i);
          new_names.push_back(top(name));
        }
        break;
    }
  }
  std::set<std::string> uniq(new_names.begin(), new_names.end());
  LabeledGraphSet out;
  out.class_names.assign(uniq.begin(), uniq.end());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    std::size_t i = keep[k];
    out.ids.push_back(set.ids[i]);
    out.graphs.push_back(set.graphs[i]);
    auto it = std::lower_bound(out.class_names.begin(), out.class_names.end(), new_names[k]);
    out.labels.push_back(static_cast<int>(it - out.class_names.begin()));
    out.splits.push_back(set.splits[i]);
  }
  return out;
}

int positive_class_index(const LabeledGraphSet& set) {
  for (std::size_t c = 0; c < set.class_names.size(); ++c) {
    if (lower(set.class_names[c]) == "campaign") return static_cast<int>(c);
  }
  return set.class_names.size() > 1 ? 1 : 0;
}

DatasetSummary validate_dataset(const fs::path& root, std::size_t jobs) {
  DatasetSummary summary;
  std::vector<std::string> dirs;
  try {
    dirs = graph_dirs(root);
  } catch (const DataError& e) {
    summary.issues.push_back(e.what());
    return summary;
  }
  if (dirs.empty()) {
    summary.issues.push_back("no graphs found under " + root.string());
    return summary;
  }
  std::map<std::string, std::string> labels;
  try {
    labels = read_labels(root);
  } catch (const DataError& e) {
    summary.issues.push_back(e.what());
  }
  for (const auto& id : dirs) {
    if (!labels.empty() && !labels.count(id)) summary.issues.push_back("missing label for graph '" + id + "'");
  }
  for (const auto& [id, name] : labels) {
    if (!std::binary_search(dirs.begin(), dirs.end(), id)) {
      summary.issues.push_back("label for graph '" + id + "' has no edges file");
    }
  }

  std::vector<std::optional<Graph>> graphs(dirs.size());
  std::vector<std::string> errors(dirs.size());
  parallel_for(dirs.size(), jobs, [&](std::size_t i) {
    try {
      graphs[i] = read_graph(root / dirs[i]);
      auto problem = graphs[i]->check_invariants();
      if (!problem.empty()) errors[i] = dirs[i] + ": " + problem;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) summary.issues.push_back(e);
  }

  std::map<std::string, ClassStats> stats;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (!graphs[i] || !labels.count(dirs[i])) continue;
    const std::string& name = labels[dirs[i]];
    auto& s = stats[name];
    const std::size_t n = graphs[i]->node_count(), m = graphs[i]->edge_count();
    if (s.graphs == 0) {
      s.name = name;
      s.min_nodes = s.max_nodes = n;
      s.min_edges = s.max_edges = m;
    }
    s.min_nodes = std::min(s.min_nodes, n);
    s.max_nodes = std::max(s.max_nodes, n);
    s.min_edges = std::min(s.min_edges, m);
    s.max_edges = std::max(s.max_edges, m);
    s.avg_nodes += static_cast<double>(n);
    s.avg_edges += static_cast<double>(m);
    ++s.graphs;
    ++summary.graph_count;
  }
  for (auto& [name, s] : stats) {
    s.avg_nodes /= static_cast<double>(s.graphs);
    s.avg_edges /= static_cast<double>(s.graphs);
    summary.classes.push_back(s);
  }
  return summary;
}

std::string format_summary(const DatasetSummary& summary) {
  std::ostringstream out;
  out << "graphs: " << summary.graph_count << "\n";
  out << "class\t#G\tnodes_max\tnodes_min\tnodes_avg\tedges_max\tedges_min\tedges_avg\n";
  char buf[64];
  for (const auto& c : summary.classes) {
    out << c.name << '\t' << c.graphs << '\t' << c.max_nodes << '\t' << c.min_nodes << '\t';
    std::snprintf(buf, sizeof buf, "%.1f", c.avg_nodes);
    out << buf << '\t' << c.max_edges << '\t' << c.min_edges << '\t';
    std::snprintf(buf, sizeof buf, "%.1f", c.avg_edges);
    out << buf << '\n';
  }
  for (const auto& issue : summary.issues) out << "issue: " << issue << '\n';
  return out.str();
}

}  // namespace decode
