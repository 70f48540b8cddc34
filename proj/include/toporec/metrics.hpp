#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace toporec {

// Support-weighted classification metrics. Zero denominators follow the
// 0-convention (precision/recall/F1 = 0 for that class).
struct MetricsReport {
  std::vector<std::string> classes;
  std::vector<int> support;                    // per class, from truths
  std::vector<double> precision, recall, f1;   // per class
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<std::vector<int>> confusion;     // [true][pred]
};

MetricsReport compute_metrics(const std::vector<int>& predictions, const std::vector<int>& truths,
                              const std::vector<std::string>& classes);

void write_metrics_json(const std::filesystem::path& path, const MetricsReport& report);
MetricsReport read_metrics_json(const std::filesystem::path& path);

}  // namespace toporec
