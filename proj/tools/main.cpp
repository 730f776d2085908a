// decode: command-line entry point. Exit codes: 0 success, 1 config error,
// 2 stage failure.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decode/dataset.hpp"
#include "decode/errors.hpp"
#include "decode/generator.hpp"
#include "decode/io.hpp"
#include "decode/metrics.hpp"
#include "decode/model_io.hpp"
#include "decode/pipeline.hpp"
#include "decode/report.hpp"
#include "decode/train.hpp"

namespace fs = std::filesystem;
using namespace decode;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> output_dir;
};

// Settings shared by the stage subcommands, applied in order: config file,
// shorthand flags, --set overrides, then global flags.
struct ConfigArgs {
  std::string config_file;
  std::string dataset;
  std::string metric;
  std::string rule;
  std::string mode;
  std::string variant;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_file, "Run-config file (key = value lines)");
    cmd->add_option("-d,--dataset", dataset, "Dataset root (overrides dataset_root)");
    cmd->add_option("--metric", metric, "density_metric override: degree|core|truss");
    cmd->add_option("--rule", rule, "threshold_rule override: fixed_half|median|midpoint");
    cmd->add_option("--mode", mode, "input_mode override: NF|RWW|NF_plus_RWW");
    cmd->add_option("--variant", variant, "variant override: gcn|gat|gin|sage");
    cmd->add_option("--set", overrides, "Extra key=value setting, repeatable");
  }

  RunConfig build(const Globals& g) const {
    RunConfig cfg = config_file.empty() ? RunConfig{} : load_run_config(config_file);
    auto set = [&](const char* key, const std::string& value) {
      if (!value.empty()) apply_setting(cfg, key, value);
    };
    set("dataset_root", dataset);
    set("density_metric", metric);
    set("threshold_rule", rule);
    set("input_mode", mode);
    set("variant", variant);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) cfg.seed = *g.seed;
    if (g.jobs) cfg.jobs = *g.jobs;
    if (g.output_dir) cfg.output_dir = *g.output_dir;
    if (cfg.dataset_root.empty()) throw ConfigError("dataset_root is not set");
    cfg.validate();
    return cfg;
  }
};

// Keeps only the first entry of every grid list: the single-model commands
// operate on one (metric, rule, mode, variant, hidden, lr, seed) point.
RunConfig first_point(RunConfig cfg) {
  cfg.density_metrics.resize(1);
  cfg.threshold_rules.resize(1);
  cfg.input_modes.resize(1);
  cfg.variants.resize(1);
  cfg.hidden_dims.resize(1);
  cfg.learning_rates.resize(1);
  cfg.seeds.resize(1);
  return cfg;
}

struct Loaded {
  LabeledGraphSet data;
  std::vector<std::string> hashes;
};

Loaded load(const RunConfig& cfg) {
  Loaded l{load_task_dataset(cfg), {}};
  for (const auto& g : l.data.graphs) l.hashes.push_back(graph_hash(g));
  stderr_log("loaded " + std::to_string(l.data.size()) + " graphs from " + cfg.dataset_root.string());
  return l;
}

void write_idmap(const fs::path& dir, const std::string& id, const Graph& g) {
  std::string out = "node_index\tnode_id\n";
  for (std::size_t v = 0; v < g.original_ids().size(); ++v)
    out += std::to_string(v) + "\t" + std::to_string(g.original_ids()[v]) + "\n";
  write_file_atomic(dir / (id + ".idmap.tsv"), out);
}

// Runs the cached embedding stages and copies one stage's per-graph outputs
// into output_dir under <graph-id><suffix>.
int export_stage(const RunConfig& full, const std::string& stage, const std::string& suffix) {
  RunConfig cfg = first_point(full);
  cfg.input_modes = {InputMode::rww};
  auto [data, hashes] = load(cfg);
  const StageCache cache(cfg.output_dir / "cache", stderr_log);
  std::vector<StageStatus> stages;
  auto keys = run_embedding_stages(cfg, data, hashes, cache, stderr_log, stages);
  const auto& chosen = stage == "density" ? keys.density : stage == "walk" ? keys.walk : keys.embed;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto body = cache.get(stage, chosen[i]);
    if (!body) throw StageError(stage, data.ids[i], "output missing from cache");
    write_file_atomic(cfg.output_dir / (data.ids[i] + suffix), *body);
    if (stage != "density") write_idmap(cfg.output_dir, data.ids[i], data.graphs[i]);
  }
  stderr_log("wrote " + std::to_string(data.size()) + " " + stage + " files to " + cfg.output_dir.string());
  return 0;
}

struct Prepared {
  RunConfig cfg;
  LabeledGraphSet split;
  std::vector<Matrix> inputs;
};

Prepared prepare_single(const RunConfig& full) {
  Prepared p{first_point(full), {}, {}};
  auto [data, hashes] = load(p.cfg);
  const StageCache cache(p.cfg.output_dir / "cache", stderr_log);
  std::vector<StageStatus> stages;
  EmbeddingKeys keys;
  if (p.cfg.needs_embeddings()) keys = run_embedding_stages(p.cfg, data, hashes, cache, stderr_log, stages);
  auto bank = build_input_bank(p.cfg, data, cache, keys);
  const InputMode mode = p.cfg.input_modes[0];
  const bool nf = mode == InputMode::nf;
  const auto* inputs = bank.find(InputBank::key(nf ? std::nullopt : std::optional(p.cfg.density_metrics[0]),
                                                nf ? std::nullopt : std::optional(p.cfg.threshold_rules[0]), mode));
  p.inputs = *inputs;
  p.split = stratified_split(data, p.cfg.split, p.cfg.seeds[0]);
  return p;
}

ModelConfig model_config(const RunConfig& cfg) {
  ModelConfig mc = cfg.sweep_config().base;
  mc.variant = cfg.variants[0];
  mc.input_mode = cfg.input_modes[0];
  mc.hidden_dim = cfg.hidden_dims[0];
  mc.learning_rate = cfg.learning_rates[0];
  mc.seed = cfg.seeds[0];
  return mc;
}

int cmd_train(const RunConfig& full) {
  auto p = prepare_single(full);
  auto result = train(model_config(p.cfg), p.split, p.inputs, p.cfg.jobs);
  save_model(p.cfg.output_dir / "model.bin", result.model);
  write_file_atomic(p.cfg.output_dir / "train_log.csv", format_train_log(result.log));
  stderr_log("best epoch " + std::to_string(result.best_epoch) + ", val loss " + format_double(result.best_val_loss));
  return 0;
}

int cmd_eval_model(const RunConfig& full, const fs::path& model_path) {
  auto p = prepare_single(full);
  const Model model = load_model(model_path);
  auto idx = p.split.indices(Split::test);
  auto preds = predict_dataset(model, p.split, p.inputs, idx, p.cfg.jobs);
  std::vector<int> y, yhat;
  std::vector<double> scores;
  const int positive = positive_class_index(p.split);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    y.push_back(p.split.labels[idx[k]]);
    yhat.push_back(preds[k].label);
    if (p.split.num_classes() == 2) scores.push_back(preds[k].probabilities(positive));
  }
  std::printf("test graphs: %zu\naccuracy: %.6f\n", idx.size(), accuracy(yhat, y));
  if (p.split.num_classes() == 2) {
    std::printf("f1: %.6f\n", f1_binary(yhat, y, positive));
    std::vector<int> binary;
    for (int label : y) binary.push_back(label == positive);
    try {
      std::printf("auc: %.6f\n", roc_auc(scores, binary).auc);
    } catch (const std::invalid_argument& e) {
      std::printf("auc: n/a (%s)\n", e.what());
    }
  } else {
    std::printf("macro_f1: %.6f\n", macro_f1(yhat, y, p.split.num_classes()));
  }
  return 0;
}

int cmd_pipeline(const RunConfig& cfg) {
  auto result = run_pipeline(cfg);
  for (const auto& r : result.reports) {
    if (!r.error.empty()) {
      std::printf("%-32s FAILED %s\n", r.cell.key().c_str(), r.error.c_str());
      continue;
    }
    std::printf("%-32s acc %.3f +- %.3f  %s %.3f +- %.3f\n", r.cell.key().c_str(), r.accuracy.mean, r.accuracy.std,
                r.binary ? "f1" : "macro_f1", r.f1.mean, r.f1.std);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-aware walk embeddings and graph classification"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "Seed for walks, embeddings and synthetic data");
  app.add_option("--jobs", globals.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", globals.output_dir, "Output directory");

  GeneratorConfig gen;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a planted dense-core vs background dataset");
  synth->add_option("--out", synth_out, "Dataset directory to create")->required();
  synth->add_option("--graphs-per-class", gen.n_graphs_per_class);
  synth->add_option("--min-nodes", gen.min_nodes);
  synth->add_option("--max-nodes", gen.max_nodes);
  synth->add_option("--core-fraction", gen.dense_core_fraction);
  synth->add_option("--p-core", gen.intra_core_edge_prob);
  synth->add_option("--p-background", gen.background_edge_prob);
  synth->add_option("--feature-dim", gen.feature_dim);

  std::string validate_root;
  auto* validate = app.add_subcommand("validate", "Check a dataset layout and print per-class statistics");
  validate->add_option("dataset", validate_root, "Dataset root")->required();

  ConfigArgs density_args, walk_args, embed_args, train_args, eval_args, pipeline_args;
  auto* density = app.add_subcommand("density", "Write <graph-id>.density.csv for every graph");
  density_args.attach(density);
  auto* walk = app.add_subcommand("walk", "Write <graph-id>.walks.txt for every graph");
  walk_args.attach(walk);
  auto* embed = app.add_subcommand("embed", "Write <graph-id>.emb.tsv for every graph");
  embed_args.attach(embed);
  auto* train_cmd = app.add_subcommand("train", "Train one model; writes model.bin and train_log.csv");
  train_args.attach(train_cmd);
  std::string model_path;
  auto* eval = app.add_subcommand("eval", "Evaluate model.bin on the test split, or run the grid sweep");
  eval_args.attach(eval);
  eval->add_option("--model", model_path, "Trained model; without it the full sweep runs");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write reports");
  pipeline_args.attach(pipeline);
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      if (globals.seed) gen.seed = *globals.seed;
      try {
        gen.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      write_dataset(generate_synthetic(gen), synth_out);
      stderr_log("wrote " + std::to_string(2 * gen.n_graphs_per_class) + " graphs to " + synth_out);
      return 0;
    }
    if (*validate) {
      auto summary = validate_dataset(validate_root, globals.jobs.value_or(1));
      std::fputs(format_summary(summary).c_str(), stdout);
      return summary.issues.empty() ? 0 : 2;
    }
    if (*density) return export_stage(density_args.build(globals), "density", ".density.csv");
    if (*walk) return export_stage(walk_args.build(globals), "walk", ".walks.txt");
    if (*embed) return export_stage(embed_args.build(globals), "embed", ".emb.tsv");
    if (*train_cmd) return cmd_train(train_args.build(globals));
    if (*eval) {
      auto cfg = eval_args.build(globals);
      return model_path.empty() ? cmd_pipeline(cfg) : cmd_eval_model(cfg, model_path);
    }
    if (*pipeline) return cmd_pipeline(pipeline_args.build(globals));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
