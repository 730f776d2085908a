#include "decode/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "decode/errors.hpp"
#include "decode/io.hpp"

namespace decode {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': invalid number '" + s + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + s + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& value, F parse_one) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) out.push_back(parse_one(item));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

template <typename F>
auto enum_parser(const std::string& key, F parse) {
  return [key, parse](const std::string& s) {
    try {
      return parse(s);
    } catch (const std::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  };
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F render) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += render(items[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto size = [](std::size_t RunConfig::*field) {
      return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number<std::size_t>(k, v); };
    };
    t["dataset_root"] = [](RunConfig& c, const std::string&, const std::string& v) { c.dataset_root = v; };
    t["output_dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; };
    t["task"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.task = enum_parser(k, parse_task)(v); };
    t["density_metric"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.density_metrics = parse_list<DensityMetric>(k, v, enum_parser(k, parse_density_metric));
    };
    t["threshold_rule"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.threshold_rules = parse_list<ThresholdRule>(k, v, enum_parser(k, parse_threshold_rule));
    };
    t["input_mode"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.input_modes = parse_list<InputMode>(k, v, enum_parser(k, parse_input_mode));
    };
    t["variant"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.variants = parse_list<Variant>(k, v, enum_parser(k, parse_variant));
    };
    t["hidden_dim"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.hidden_dims = parse_list<std::size_t>(k, v, [&](const std::string& s) { return parse_number<std::size_t>(k, s); });
    };
    t["learning_rate"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.learning_rates = parse_list<double>(k, v, [&](const std::string& s) { return parse_number<double>(k, s); });
    };
    t["seeds"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.seeds = parse_list<std::uint64_t>(k, v, [&](const std::string& s) { return parse_number<std::uint64_t>(k, s); });
    };
    t["num_layers"] = size(&RunConfig::num_layers);
    t["epochs"] = size(&RunConfig::epochs);
    t["patience"] = size(&RunConfig::patience);
    t["batch_size"] = size(&RunConfig::batch_size);
    t["jobs"] = size(&RunConfig::jobs);
    t["class_weights"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.class_weights = parse_bool(k, v); };
    t["truss_offset"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.truss_offset = parse_bool(k, v); };
    t["train_fraction"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.split.train = parse_number<double>(k, v); };
    t["val_fraction"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.split.val = parse_number<double>(k, v); };
    t["test_fraction"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.split.test = parse_number<double>(k, v); };
    t["walk_length"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.walk.walk_length = parse_number<std::size_t>(k, v); };
    t["walks_per_node"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.walk.walks_per_node = parse_number<std::size_t>(k, v); };
    t["embed_dim"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sgns.dim = parse_number<std::size_t>(k, v); };
    t["window_radius"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sgns.window_radius = parse_number<std::size_t>(k, v); };
    t["negatives"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sgns.negatives_per_positive = parse_number<std::size_t>(k, v); };
    t["embed_epochs"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sgns.epochs = parse_number<std::size_t>(k, v); };
    t["embed_learning_rate"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sgns.learning_rate = parse_number<double>(k, v); };
    t["embed_min_learning_rate"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sgns.min_learning_rate = parse_number<double>(k, v); };
    t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); };
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (density_metrics.empty() || threshold_rules.empty() || input_modes.empty() || variants.empty() ||
      hidden_dims.empty() || learning_rates.empty())
    throw ConfigError("config: grid lists must be non-empty");
  if (seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (num_layers == 0) throw ConfigError("config: num_layers must be >= 1");
  if (epochs == 0 || batch_size == 0) throw ConfigError("config: epochs and batch_size must be >= 1");
  for (auto h : hidden_dims)
    if (h == 0) throw ConfigError("config: hidden_dim must be >= 1");
  for (double lr : learning_rates)
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("config: learning_rate must be positive and finite");
  if (!(split.train > 0 && split.val > 0 && split.test > 0) || std::abs(split.train + split.val + split.test - 1.0) > 1e-9)
    throw ConfigError("config: split fractions must be positive and sum to 1");
  if (walk.walk_length == 0 || walk.walks_per_node == 0) throw ConfigError("config: walk_length and walks_per_node must be >= 1");
  if (sgns.dim == 0 || sgns.window_radius == 0 || sgns.epochs == 0)
    throw ConfigError("config: embed_dim, window_radius and embed_epochs must be >= 1");
  if (!(sgns.learning_rate > 0) || sgns.min_learning_rate < 0) throw ConfigError("config: invalid embedding learning rate");
  if (jobs == 0) throw ConfigError("config: jobs must be >= 1");
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig s;
  s.metrics = density_metrics;
  s.rules = threshold_rules;
  s.input_modes = input_modes;
  s.variants = variants;
  s.hidden_dims = hidden_dims;
  s.learning_rates = learning_rates;
  s.seeds = seeds;
  s.base.num_layers = num_layers;
  s.base.epochs = epochs;
  s.base.patience = patience;
  s.base.batch_size = batch_size;
  s.base.class_weights = class_weights;
  s.fractions = split;
  s.jobs = jobs;
  return s;
}

bool RunConfig::needs_embeddings() const {
  return std::any_of(input_modes.begin(), input_modes.end(), [](InputMode m) { return m != InputMode::nf; });
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, key, trim(value));
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, trim(std::string_view(line).substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text);
}

std::string format_run_config(const RunConfig& c) {
  auto str = [](auto v) { return std::to_string(v); };
  auto name = [](auto v) { return std::string(to_string(v)); };
  auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };
  std::string out;
  auto put = [&](const char* key, const std::string& value) { out += std::string(key) + " = " + value + "\n"; };
  put("dataset_root", c.dataset_root.string());
  put("output_dir", c.output_dir.string());
  put("task", to_string(c.task));
  put("density_metric", join(c.density_metrics, name));
  put("threshold_rule", join(c.threshold_rules, name));
  put("input_mode", join(c.input_modes, name));
  put("variant", join(c.variants, name));
  put("hidden_dim", join(c.hidden_dims, str));
  put("learning_rate", join(c.learning_rates, shortest));
  put("seeds", join(c.seeds, str));
  put("num_layers", str(c.num_layers));
  put("epochs", str(c.epochs));
  put("patience", str(c.patience));
  put("batch_size", str(c.batch_size));
  put("class_weights", boolean(c.class_weights));
  put("train_fraction", shortest(c.split.train));
  put("val_fraction", shortest(c.split.val));
  put("test_fraction", shortest(c.split.test));
  put("walk_length", str(c.walk.walk_length));
  put("walks_per_node", str(c.walk.walks_per_node));
  put("embed_dim", str(c.sgns.dim));
  put("window_radius", str(c.sgns.window_radius));
  put("negatives", str(c.sgns.negatives_per_positive));
  put("embed_epochs", str(c.sgns.epochs));
  put("embed_learning_rate", shortest(c.sgns.learning_rate));
  put("embed_min_learning_rate", shortest(c.sgns.min_learning_rate));
  put("truss_offset", boolean(c.truss_offset));
  put("seed", str(c.seed));
  put("jobs", str(c.jobs));
  return out;
}

}  // namespace decode
