#include "decode/pipeline.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <map>

#include "decode/dataset.hpp"
#include "decode/errors.hpp"
#include "decode/io.hpp"
#include "decode/parallel.hpp"
#include "decode/report.hpp"
#include "decode/rww.hpp"
#include "decode/sgns.hpp"
#include "json.hpp"

namespace decode {
namespace {

// Bump when a stage's output format or algorithm changes.
constexpr const char* kCacheVersion = "1";

std::string keyed(std::initializer_list<std::string_view> parts) {
  std::string text = kCacheVersion;
  for (auto p : parts) {
    text += '\x1f';
    text += p;
  }
  return sha256_hex(text);
}

struct Counter {
  std::atomic<std::size_t> computed{0};
  std::atomic<std::size_t> cached{0};
};

StageStatus finish(const std::string& stage, const Counter& c, const LogSink& log) {
  StageStatus s{stage, c.computed.load(), c.cached.load()};
  log("stage " + stage + ": " + (s.all_cached() ? "cached" : "computed") + " (" + std::to_string(s.computed) +
      " computed, " + std::to_string(s.cached) + " cached)");
  return s;
}

template <typename Fn>
void per_graph(const LabeledGraphSet& set, std::size_t jobs, const std::string& stage, Fn&& fn) {
  parallel_for(set.size(), jobs, [&](std::size_t i) {
    try {
      fn(i);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, set.ids[i], e.what());
    }
  });
}

}  // namespace

void stderr_log(const std::string& line) { std::fprintf(stderr, "[decode] %s\n", line.c_str()); }

StageCache::StageCache(std::filesystem::path root, LogSink log) : root_(std::move(root)), log_(std::move(log)) {}

std::filesystem::path StageCache::path(const std::string& stage, const std::string& key) const {
  return root_ / stage / key;
}

std::optional<std::string> StageCache::get(const std::string& stage, const std::string& key) const {
  const auto p = path(stage, key);
  std::error_code ec;
  if (!std::filesystem::exists(p, ec)) return std::nullopt;
  std::string text;
  try {
    text = read_file(p);
  } catch (const std::exception&) {
    log_("warning: unreadable cache entry " + p.string() + ", recomputing");
    return std::nullopt;
  }
  const auto nl = text.find('\n');
  if (nl == std::string::npos || text.compare(0, 7, "sha256 ") != 0 ||
      text.substr(7, nl - 7) != sha256_hex(std::string_view(text).substr(nl + 1))) {
    log_("warning: corrupt cache entry " + p.string() + ", recomputing");
    return std::nullopt;
  }
  return text.substr(nl + 1);
}

void StageCache::put(const std::string& stage, const std::string& key, std::string_view body) const {
  std::string text = "sha256 " + sha256_hex(body) + "\n";
  text += body;
  write_file_atomic(path(stage, key), text);
}

std::string format_density_csv(const Graph& g, const DensityProfile& profile) {
  std::string out = "node_id,raw,phi\n";
  const auto& ids = g.original_ids();
  for (std::size_t v = 0; v < profile.raw.size(); ++v) {
    out += std::to_string(ids.empty() ? static_cast<std::int64_t>(v) : ids[v]);
    out += ',' + format_double(profile.raw[v]) + ',' + format_double(profile.phi[v]) + '\n';
  }
  return out;
}

DensityProfile parse_density_csv(std::string_view text, DensityMetric metric) {
  DensityProfile p;
  p.metric = metric;
  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos || text.substr(0, pos) != "node_id,raw,phi") throw DataError("density csv: bad header");
  ++pos;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    const auto c1 = line.find(','), c2 = line.rfind(',');
    if (c1 == std::string_view::npos || c1 == c2) throw DataError("density csv: malformed row");
    double raw = 0, phi = 0;
    auto r1 = std::from_chars(line.data() + c1 + 1, line.data() + c2, raw);
    auto r2 = std::from_chars(line.data() + c2 + 1, line.data() + line.size(), phi);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != line.data() + c2 ||
        r2.ptr != line.data() + line.size())
      throw DataError("density csv: malformed number");
    p.raw.push_back(raw);
    p.phi.push_back(phi);
  }
  return p;
}

std::string graph_hash(const Graph& g) { return sha256_hex(g.canonical_bytes()); }

std::string dataset_hash(const LabeledGraphSet& set, const std::vector<std::string>& graph_hashes) {
  std::string text;
  for (const auto& name : set.class_names) text += "class " + name + "\n";
  for (std::size_t i = 0; i < set.size(); ++i)
    text += set.ids[i] + " " + std::to_string(set.labels[i]) + " " + graph_hashes.at(i) + "\n";
  return sha256_hex(text);
}

LabeledGraphSet load_task_dataset(const RunConfig& cfg) {
  try {
    return derive_task(load_dataset(cfg.dataset_root, cfg.jobs), cfg.task);
  } catch (const std::exception& e) {
    throw StageError("load", "", e.what());
  }
}

EmbeddingKeys run_embedding_stages(const RunConfig& cfg, const LabeledGraphSet& data,
                                   const std::vector<std::string>& ghash, const StageCache& cache,
                                   const LogSink& log, std::vector<StageStatus>& stages) {
  const auto nm = cfg.density_metrics.size(), nr = cfg.threshold_rules.size(), ng = data.size();
  // Keys indexed [metric][graph] and [metric][rule][graph] flattened.
  EmbeddingKeys keys;
  auto& dkey = keys.density;
  auto& wkey = keys.walk;
  auto& ekey = keys.embed;
  dkey.resize(nm * ng);
  wkey.resize(nm * nr * ng);
  ekey.resize(nm * nr * ng);

  Counter dc;
  for (std::size_t m = 0; m < nm; ++m) {
    const DensityMetric metric = cfg.density_metrics[m];
    per_graph(data, cfg.jobs, "density", [&](std::size_t i) {
      auto& key = dkey[m * ng + i];
      key = keyed({"density", ghash[i], to_string(metric), cfg.truss_offset ? "offset" : "plain"});
      if (cache.get("density", key)) {
        ++dc.cached;
        return;
      }
      auto profile = density_profile(data.graphs[i], metric, {cfg.truss_offset});
      cache.put("density", key, format_density_csv(data.graphs[i], profile));
      ++dc.computed;
    });
  }
  stages.push_back(finish("density", dc, log));

  auto load_entry = [&](const std::string& stage, const std::string& key) {
    auto body = cache.get(stage, key);
    if (!body) throw DataError(stage + " output missing from cache");
    return *body;
  };

  Counter wc;
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t r = 0; r < nr; ++r) {
      WalkConfig wcfg = cfg.walk;
      wcfg.threshold_rule = cfg.threshold_rules[r];
      wcfg.seed = cfg.seed;
      per_graph(data, cfg.jobs, "walk", [&](std::size_t i) {
        auto& key = wkey[(m * nr + r) * ng + i];
        key = keyed({"walk", dkey[m * ng + i], to_string(wcfg.threshold_rule), std::to_string(wcfg.walk_length),
                     std::to_string(wcfg.walks_per_node), std::to_string(wcfg.seed)});
        if (cache.get("walk", key)) {
          ++wc.cached;
          return;
        }
        auto profile = parse_density_csv(load_entry("density", dkey[m * ng + i]), cfg.density_metrics[m]);
        auto corpus = generate_walks(data.graphs[i], profile, wcfg);
        cache.put("walk", key, format_walks(corpus));
        ++wc.computed;
      });
    }
  }
  stages.push_back(finish("walk", wc, log));

  Counter ec;
  SgnsConfig scfg = cfg.sgns;
  scfg.seed = cfg.seed;
  const std::string sgns_text = std::to_string(scfg.dim) + "," + std::to_string(scfg.window_radius) + "," +
                                std::to_string(scfg.negatives_per_positive) + "," + std::to_string(scfg.epochs) +
                                "," + format_double(scfg.learning_rate) + "," +
                                format_double(scfg.min_learning_rate) + "," + std::to_string(scfg.seed) + "," +
                                std::to_string(scfg.threads);
  for (std::size_t j = 0; j < nm * nr; ++j) {
    per_graph(data, cfg.jobs, "embed", [&](std::size_t i) {
      auto& key = ekey[j * ng + i];
      key = keyed({"embed", wkey[j * ng + i], sgns_text});
      if (cache.get("embed", key)) {
        ++ec.cached;
        return;
      }
      auto corpus = parse_walks(load_entry("walk", wkey[j * ng + i]));
      auto emb = train_sgns(corpus, data.graphs[i].node_count(), scfg);
      cache.put("embed", key, format_embedding(emb.rows));
      ++ec.computed;
    });
  }
  stages.push_back(finish("embed", ec, log));
  return keys;
}

InputBank build_input_bank(const RunConfig& cfg, const LabeledGraphSet& data, const StageCache& cache,
                           const EmbeddingKeys& keys) {
  const auto nr = cfg.threshold_rules.size(), ng = data.size();
  InputBank bank;
  auto fill = [&](std::optional<std::size_t> m, std::optional<std::size_t> r, InputMode mode) {
    std::vector<Matrix> inputs(ng);
    per_graph(data, cfg.jobs, "eval", [&](std::size_t i) {
      const Matrix* emb = nullptr;
      Matrix parsed;
      if (mode != InputMode::nf) {
        auto body = cache.get("embed", keys.embed.at((*m * nr + *r) * ng + i));
        if (!body) throw DataError("embedding missing from cache");
        parsed = parse_embedding(*body);
        emb = &parsed;
      }
      inputs[i] = build_inputs(data.graphs[i], emb, mode);
    });
    bank.put(InputBank::key(m ? std::optional(cfg.density_metrics[*m]) : std::nullopt,
                            r ? std::optional(cfg.threshold_rules[*r]) : std::nullopt, mode),
             std::move(inputs));
  };
  for (InputMode mode : cfg.input_modes) {
    if (mode == InputMode::nf) {
      fill(std::nullopt, std::nullopt, mode);
      continue;
    }
    for (std::size_t m = 0; m < cfg.density_metrics.size(); ++m)
      for (std::size_t r = 0; r < nr; ++r) fill(m, r, mode);
  }
  return bank;
}

PipelineResult run_pipeline(const RunConfig& cfg, const LogSink& log) {
  cfg.validate();
  PipelineResult result;
  const StageCache cache(cfg.output_dir / "cache", log);

  const LabeledGraphSet data = load_task_dataset(cfg);
  std::vector<std::string> ghash(data.size());
  parallel_for(data.size(), cfg.jobs, [&](std::size_t i) { ghash[i] = graph_hash(data.graphs[i]); });
  const std::string data_hash = dataset_hash(data, ghash);
  log("stage load: " + std::to_string(data.size()) + " graphs, " + std::to_string(data.num_classes()) +
      " classes, dataset " + data_hash.substr(0, 16));

  EmbeddingKeys keys;
  if (cfg.needs_embeddings()) keys = run_embedding_stages(cfg, data, ghash, cache, log, result.stages);
  const auto& dkey = keys.density;
  const auto& wkey = keys.walk;
  const auto& ekey = keys.embed;

  // Eval: one cache entry for the whole sweep.
  const SweepConfig sweep = cfg.sweep_config();
  RunConfig echo = cfg;
  echo.dataset_root.clear();
  echo.output_dir.clear();
  echo.jobs = 1;
  std::string eval_material = data_hash + "\n" + format_run_config(echo);
  for (const auto& k : ekey) eval_material += k + "\n";
  const std::string eval_key = keyed({"eval", eval_material});

  Counter vc;
  std::string report_text;
  if (auto cached = cache.get("eval", eval_key)) {
    try {
      result.reports = parse_report_json(*cached);
      report_text = *cached;
      ++vc.cached;
    } catch (const DataError& e) {
      log(std::string("warning: unusable eval cache entry (") + e.what() + "), recomputing");
    }
  }
  if (report_text.empty()) {
    const InputBank bank = build_input_bank(cfg, data, cache, keys);
    try {
      result.reports = grid_sweep(data, bank, sweep);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("eval", "", e.what());
    }
    report_text = format_report_json(result.reports);
    cache.put("eval", eval_key, report_text);
    ++vc.computed;
  }
  result.stages.push_back(finish("eval", vc, log));

  write_reports(cfg.output_dir, result.reports);

  nlohmann::ordered_json manifest;
  manifest["config"] = format_run_config(cfg);
  manifest["seeds"] = cfg.seeds;
  manifest["embedding_seed"] = cfg.seed;
  manifest["dataset_sha256"] = data_hash;
  nlohmann::ordered_json graphs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < data.size(); ++i)
    graphs.push_back({{"id", data.ids[i]}, {"label", data.class_names[data.labels[i]]}, {"sha256", ghash[i]}});
  manifest["graphs"] = std::move(graphs);
  auto digest = [](const std::vector<std::string>& keys) {
    std::string all;
    for (const auto& k : keys) all += k + "\n";
    return sha256_hex(all);
  };
  manifest["stage_keys"] = {{"density", digest(dkey)}, {"walk", digest(wkey)}, {"embed", digest(ekey)}, {"eval", eval_key}};
  manifest["report_sha256"] = sha256_hex(report_text);
  write_file_atomic(cfg.output_dir / "run_manifest.json", manifest.dump(2) + "\n");
  log("wrote " + (cfg.output_dir / "report.json").string());
  return result;
}

}  // namespace decode
