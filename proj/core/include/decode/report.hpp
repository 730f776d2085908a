#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "decode/sweep.hpp"

namespace decode {

std::string format_report_json(const std::vector<MetricsReport>& reports);
std::vector<MetricsReport> parse_report_json(std::string_view text);

/// "fpr,tpr" rows.
std::string format_roc_csv(const MetricsReport& report);
/// Header "label,<class names...>", one row per true class.
std::string format_confusion_csv(const MetricsReport& report);

/// Markdown tables laid out as variant x {NF, RWW, NF+RWW} rows by density
/// metric columns; each RWW entry shows the threshold rule with the best
/// validation accuracy. One table for accuracy, one for F1 or macro-F1.
std::string format_summary_md(const std::vector<MetricsReport>& reports);

/// report.json, summary.md, roc_<cell>.csv (binary) and confusion_<cell>.csv.
void write_reports(const std::filesystem::path& dir, const std::vector<MetricsReport>& reports);

}  // namespace decode
