#include "decode/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "decode/dataset.hpp"
#include "decode/parallel.hpp"
#include "decode/train.hpp"

namespace decode {

std::string SweepCell::key() const {
  std::string k = std::string(to_string(variant)) + "_" + to_string(input_mode);
  if (metric) k += std::string("_") + to_string(*metric);
  if (rule) k += std::string("_") + to_string(*rule);
  return k;
}

std::string InputBank::key(std::optional<DensityMetric> metric, std::optional<ThresholdRule> rule, InputMode mode) {
  std::string k = to_string(mode);
  k += "|";
  k += metric ? to_string(*metric) : "-";
  k += "|";
  k += rule ? to_string(*rule) : "-";
  return k;
}

const std::vector<Matrix>* InputBank::find(const std::string& key) const {
  auto it = inputs_.find(key);
  return it == inputs_.end() ? nullptr : &it->second;
}

std::vector<SweepCell> enumerate_cells(const SweepConfig& cfg) {
  std::vector<SweepCell> cells;
  for (Variant v : cfg.variants) {
    for (InputMode mode : cfg.input_modes) {
      if (mode == InputMode::nf) {
        cells.push_back({v, mode, std::nullopt, std::nullopt});
        continue;
      }
      for (DensityMetric m : cfg.metrics) {
        for (ThresholdRule r : cfg.rules) cells.push_back({v, mode, m, r});
      }
    }
  }
  return cells;
}

namespace {

struct RunOutcome {
  double val_accuracy = 0.0;
  std::vector<int> test_labels;
  std::vector<int> test_preds;
  std::vector<double> test_scores;  // positive-class probability
  std::string error;
};

}  // namespace

std::vector<MetricsReport> grid_sweep(const LabeledGraphSet& data, const InputBank& bank, const SweepConfig& cfg) {
  const auto cells = enumerate_cells(cfg);
  const std::size_t n_hidden = cfg.hidden_dims.size(), n_lr = cfg.learning_rates.size(), n_seed = cfg.seeds.size();
  const std::size_t per_cell = n_hidden * n_lr * n_seed;
  const bool binary = data.num_classes() == 2;
  const int positive = positive_class_index(data);

  std::vector<LabeledGraphSet> splits;
  for (auto seed : cfg.seeds) splits.push_back(stratified_split(data, cfg.fractions, seed));

  std::vector<RunOutcome> runs(cells.size() * per_cell);
  parallel_for(runs.size(), cfg.jobs, [&](std::size_t job) {
    const std::size_t c = job / per_cell, rest = job % per_cell;
    const std::size_t h = rest / (n_lr * n_seed), l = (rest / n_seed) % n_lr, s = rest % n_seed;
    RunOutcome& out = runs[job];
    try {
      const auto* inputs = bank.find(InputBank::key(cells[c].metric, cells[c].rule, cells[c].input_mode));
      if (!inputs) throw std::invalid_argument("no inputs prepared for cell " + cells[c].key());
      const LabeledGraphSet& split = splits[s];
      ModelConfig mc = cfg.base;
      mc.variant = cells[c].variant;
      mc.input_mode = cells[c].input_mode;
      mc.hidden_dim = cfg.hidden_dims[h];
      mc.learning_rate = cfg.learning_rates[l];
      mc.seed = cfg.seeds[s];
      TrainResult trained = train(mc, split, *inputs, 1);

      auto val_idx = split.indices(Split::val);
      auto val_pred = predict_dataset(trained.model, split, *inputs, val_idx);
      std::size_t hit = 0;
      for (std::size_t k = 0; k < val_idx.size(); ++k) hit += val_pred[k].label == split.labels[val_idx[k]];
      out.val_accuracy = val_idx.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(val_idx.size());

      auto test_idx = split.indices(Split::test);
      auto test_pred = predict_dataset(trained.model, split, *inputs, test_idx);
      for (std::size_t k = 0; k < test_idx.size(); ++k) {
        out.test_labels.push_back(split.labels[test_idx[k]]);
        out.test_preds.push_back(test_pred[k].label);
        out.test_scores.push_back(test_pred[k].probabilities(std::min<int>(positive, static_cast<int>(data.num_classes()) - 1)));
      }
    } catch (const std::exception& e) {
      out.error = cells[c].key() + " hidden=" + std::to_string(cfg.hidden_dims[h]) +
                  " lr=" + std::to_string(cfg.learning_rates[l]) + " seed=" + std::to_string(cfg.seeds[s]) + ": " +
                  e.what();
    }
  });

  std::vector<MetricsReport> reports;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    MetricsReport rep;
    rep.cell = cells[c];
    rep.binary = binary;
    rep.class_names = data.class_names;
    rep.positive_class = positive;
    rep.seeds = cfg.seeds;

    // Grid point selection: highest mean val accuracy, then lower lr, then smaller hidden.
    std::optional<std::pair<std::size_t, std::size_t>> best;
    double best_val = -1.0;
    std::string first_error;
    for (std::size_t l = 0; l < n_lr; ++l) {
      for (std::size_t h = 0; h < n_hidden; ++h) {
        bool ok = true;
        double val = 0.0;
        for (std::size_t s = 0; s < n_seed; ++s) {
          const auto& r = runs[c * per_cell + (h * n_lr + l) * n_seed + s];
          if (!r.error.empty()) {
            ok = false;
            if (first_error.empty()) first_error = r.error;
            break;
          }
          val += r.val_accuracy;
        }
        if (!ok) continue;
        val /= static_cast<double>(n_seed);
        auto better = [&] {
          if (!best) return true;
          if (val != best_val) return val > best_val;
          const double lr = cfg.learning_rates[l], blr = cfg.learning_rates[best->second];
          if (lr != blr) return lr < blr;
          return cfg.hidden_dims[h] < cfg.hidden_dims[best->first];
        };
        if (better()) {
          best = {h, l};
          best_val = val;
        }
      }
    }
    if (!best) {
      rep.error = first_error.empty() ? "no grid points" : first_error;
      reports.push_back(std::move(rep));
      continue;
    }
    const auto [h, l] = *best;
    rep.hidden_dim = cfg.hidden_dims[h];
    rep.learning_rate = cfg.learning_rates[l];
    rep.confusion.assign(data.num_classes(), std::vector<std::size_t>(data.num_classes(), 0));
    std::vector<double> vals, accs, f1s, pooled_scores;
    std::vector<int> pooled_labels;
    for (std::size_t s = 0; s < n_seed; ++s) {
      const auto& r = runs[c * per_cell + (h * n_lr + l) * n_seed + s];
      vals.push_back(r.val_accuracy);
      accs.push_back(accuracy(r.test_preds, r.test_labels));
      f1s.push_back(binary ? f1_binary(r.test_preds, r.test_labels, positive)
                           : macro_f1(r.test_preds, r.test_labels, data.num_classes()));
      auto cm = confusion_matrix(r.test_preds, r.test_labels, data.num_classes());
      for (std::size_t i = 0; i < cm.size(); ++i)
        for (std::size_t j = 0; j < cm.size(); ++j) rep.confusion[i][j] += cm[i][j];
      if (binary) {
        pooled_scores.insert(pooled_scores.end(), r.test_scores.begin(), r.test_scores.end());
        for (int y : r.test_labels) pooled_labels.push_back(y == positive ? 1 : 0);
      }
    }
    rep.seed_accuracy = accs;
    rep.val_accuracy = mean_std(vals);
    rep.accuracy = mean_std(accs);
    rep.f1 = mean_std(f1s);
    if (binary) {
      try {
        auto roc = roc_auc(pooled_scores, pooled_labels);
        rep.roc = std::move(roc.points);
        rep.auc = roc.auc;
      } catch (const std::invalid_argument&) {
        rep.auc = std::nan("");
      }
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace decode
