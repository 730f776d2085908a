#include "decode/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "decode/errors.hpp"
#include "decode/io.hpp"
#include "json.hpp"

using nlohmann::json;

namespace decode {
namespace {

json stat_json(const MeanStd& s) { return {{"mean", s.mean}, {"std", s.std}}; }

MeanStd stat_from(const json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

double number_or_nan(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

std::string format_report_json(const std::vector<MetricsReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json j;
    j["cell"] = r.cell.key();
    j["variant"] = to_string(r.cell.variant);
    j["input_mode"] = to_string(r.cell.input_mode);
    j["density_metric"] = r.cell.metric ? json(to_string(*r.cell.metric)) : json(nullptr);
    j["threshold_rule"] = r.cell.rule ? json(to_string(*r.cell.rule)) : json(nullptr);
    j["task"] = r.binary ? "binary" : "multiclass";
    j["class_names"] = r.class_names;
    j["positive_class"] = r.positive_class;
    j["seeds"] = r.seeds;
    if (!r.error.empty()) {
      j["error"] = r.error;
      arr.push_back(std::move(j));
      continue;
    }
    j["hidden_dim"] = r.hidden_dim;
    j["learning_rate"] = r.learning_rate;
    j["seed_accuracy"] = r.seed_accuracy;
    j["val_accuracy"] = stat_json(r.val_accuracy);
    j["accuracy"] = stat_json(r.accuracy);
    j[r.binary ? "f1" : "macro_f1"] = stat_json(r.f1);
    j["confusion"] = r.confusion;
    if (r.binary) {
      j["auc"] = std::isnan(r.auc) ? json(nullptr) : json(r.auc);
      json roc = json::array();
      for (auto [fpr, tpr] : r.roc) roc.push_back({fpr, tpr});
      j["roc"] = std::move(roc);
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<MetricsReport> parse_report_json(std::string_view text) {
  std::vector<MetricsReport> out;
  try {
    for (const auto& j : json::parse(text)) {
      MetricsReport r;
      r.cell.variant = parse_variant(j.at("variant").get<std::string>());
      r.cell.input_mode = parse_input_mode(j.at("input_mode").get<std::string>());
      if (!j.at("density_metric").is_null()) r.cell.metric = parse_density_metric(j["density_metric"].get<std::string>());
      if (!j.at("threshold_rule").is_null()) r.cell.rule = parse_threshold_rule(j["threshold_rule"].get<std::string>());
      r.binary = j.at("task").get<std::string>() == "binary";
      r.class_names = j.at("class_names").get<std::vector<std::string>>();
      r.positive_class = j.at("positive_class").get<int>();
      r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      if (j.contains("error")) {
        r.error = j["error"].get<std::string>();
        out.push_back(std::move(r));
        continue;
      }
      r.hidden_dim = j.at("hidden_dim").get<std::size_t>();
      r.learning_rate = j.at("learning_rate").get<double>();
      r.seed_accuracy = j.at("seed_accuracy").get<std::vector<double>>();
      r.val_accuracy = stat_from(j.at("val_accuracy"));
      r.accuracy = stat_from(j.at("accuracy"));
      r.f1 = stat_from(j.at(r.binary ? "f1" : "macro_f1"));
      r.confusion = j.at("confusion").get<ConfusionMatrix>();
      if (r.binary) {
        r.auc = number_or_nan(j.at("auc"));
        for (const auto& p : j.at("roc")) r.roc.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("report json: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("report json: ") + e.what());
  }
  return out;
}

std::string format_roc_csv(const MetricsReport& report) {
  std::string out = "fpr,tpr\n";
  for (auto [fpr, tpr] : report.roc) out += format_double(fpr) + "," + format_double(tpr) + "\n";
  return out;
}

std::string format_confusion_csv(const MetricsReport& report) {
  std::string out = "label";
  for (const auto& name : report.class_names) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < report.confusion.size(); ++i) {
    out += report.class_names.at(i);
    for (auto v : report.confusion[i]) out += "," + std::to_string(v);
    out += "\n";
  }
  return out;
}

std::string format_summary_md(const std::vector<MetricsReport>& reports) {
  const DensityMetric metrics[] = {DensityMetric::degree, DensityMetric::core, DensityMetric::truss};
  const InputMode modes[] = {InputMode::nf, InputMode::rww, InputMode::nf_plus_rww};
  const Variant variants[] = {Variant::gcn, Variant::gat, Variant::gin, Variant::sage};
  const bool binary = reports.empty() || reports.front().binary;

  // Best-validation report per (variant, mode, metric); NF applies to every metric column.
  std::map<std::tuple<int, int, int>, const MetricsReport*> best;
  for (const auto& r : reports) {
    if (!r.error.empty()) continue;
    for (int m = 0; m < 3; ++m) {
      if (r.cell.metric && *r.cell.metric != metrics[m]) continue;
      auto k = std::make_tuple(static_cast<int>(r.cell.variant), static_cast<int>(r.cell.input_mode), m);
      auto it = best.find(k);
      if (it == best.end() || r.val_accuracy.mean > it->second->val_accuracy.mean) best[k] = &r;
    }
  }

  auto short_rule = [](const MetricsReport& r) -> std::string {
    if (!r.cell.rule) return "-";
    switch (*r.cell.rule) {
      case ThresholdRule::fixed_half: return "0.5";
      case ThresholdRule::median: return "median";
      case ThresholdRule::midpoint: return "mid";
    }
    return "?";
  };
  auto table = [&](const std::string& title, bool use_f1) {
    std::string out = "## " + title + "\n\n";
    out += "| Model | Input | Degree tau | Degree | Core tau | Core | Truss tau | Truss |\n";
    out += "|---|---|---|---|---|---|---|---|\n";
    for (Variant v : variants) {
      for (InputMode mode : modes) {
        bool any = false;
        std::string row = std::string("| ") + to_string(v) + " | " + (mode == InputMode::nf_plus_rww ? "NF + RWW" : to_string(mode));
        for (int m = 0; m < 3; ++m) {
          auto it = best.find({static_cast<int>(v), static_cast<int>(mode), m});
          if (it == best.end()) {
            row += " | | ";
            continue;
          }
          any = true;
          const MeanStd& s = use_f1 ? it->second->f1 : it->second->accuracy;
          row += " | " + short_rule(*it->second) + " | " + fixed3(s.mean) + " ± " + fixed3(s.std);
        }
        if (any) out += row + " |\n";
      }
    }
    return out + "\n";
  };

  std::string out = "# Results\n\n";
  out += table(binary ? "Accuracy (binary)" : "Accuracy (multiclass)", false);
  out += table(binary ? "F1 (binary)" : "Macro-F1 (multiclass)", true);
  if (binary) {
    out += "## AUC\n\n| Cell | AUC |\n|---|---|\n";
    for (const auto& r : reports) {
      if (r.error.empty()) out += "| " + r.cell.key() + " | " + (std::isnan(r.auc) ? std::string("n/a") : fixed3(r.auc)) + " |\n";
    }
    out += "\n";
  }
  bool failures = false;
  for (const auto& r : reports) {
    if (r.error.empty()) continue;
    if (!failures) out += "## Failed cells\n\n";
    failures = true;
    out += "- " + r.cell.key() + ": " + r.error + "\n";
  }
  return out;
}

void write_reports(const std::filesystem::path& dir, const std::vector<MetricsReport>& reports) {
  write_file_atomic(dir / "report.json", format_report_json(reports));
  write_file_atomic(dir / "summary.md", format_summary_md(reports));
  for (const auto& r : reports) {
    if (!r.error.empty()) continue;
    if (r.binary) write_file_atomic(dir / ("roc_" + r.cell.key() + ".csv"), format_roc_csv(r));
    write_file_atomic(dir / ("confusion_" + r.cell.key() + ".csv"), format_confusion_csv(r));
  }
}

}  // namespace decode
