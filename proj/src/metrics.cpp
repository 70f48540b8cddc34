#include "toporec/metrics.hpp"

#include <fstream>

#include <json.hpp>

#include "toporec/errors.hpp"

namespace toporec {

MetricsReport compute_metrics(const std::vector<int>& predictions, const std::vector<int>& truths,
                              const std::vector<std::string>& classes) {
  if (predictions.size() != truths.size())
    throw LengthMismatch("compute_metrics: predictions vs truths");
  const int c = static_cast<int>(classes.size());
  MetricsReport r;
  r.classes = classes;
  r.support.assign(c, 0);
  r.precision.assign(c, 0.0);
  r.recall.assign(c, 0.0);
  r.f1.assign(c, 0.0);
  r.confusion.assign(c, std::vector<int>(c, 0));

  std::size_t correct = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = truths[i], p = predictions[i];
    if (t < 0 || t >= c || p < 0 || p >= c) throw Error("compute_metrics: label out of range");
    ++r.confusion[t][p];
    ++r.support[t];
    if (t == p) ++correct;
  }
  r.accuracy = truths.empty() ? 0.0 : static_cast<double>(correct) / truths.size();

  for (int k = 0; k < c; ++k) {
    int tp = r.confusion[k][k];
    int predicted = 0, actual = r.support[k];
    for (int t = 0; t < c; ++t) predicted += r.confusion[t][k];
    r.precision[k] = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    r.recall[k] = actual > 0 ? static_cast<double>(tp) / actual : 0.0;
    const double pr = r.precision[k] + r.recall[k];
    r.f1[k] = pr > 0.0 ? 2.0 * r.precision[k] * r.recall[k] / pr : 0.0;
  }

  const double n = static_cast<double>(truths.size());
  if (n > 0) {
    for (int k = 0; k < c; ++k) {
      const double w = r.support[k] / n;
      r.weighted_precision += w * r.precision[k];
      r.weighted_recall += w * r.recall[k];
      r.weighted_f1 += w * r.f1[k];
    }
  }
  return r;
}

void write_metrics_json(const std::filesystem::path& path, const MetricsReport& report) {
  nlohmann::json j;
  j["classes"] = report.classes;
  j["support"] = report.support;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["weighted_precision"] = report.weighted_precision;
  j["weighted_recall"] = report.weighted_recall;
  j["weighted_f1"] = report.weighted_f1;
  j["accuracy"] = report.accuracy;
  j["confusion"] = report.confusion;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

MetricsReport read_metrics_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  nlohmann::json j;
  in >> j;
  MetricsReport r;
  r.classes = j.at("classes").get<std::vector<std::string>>();
  r.support = j.at("support").get<std::vector<int>>();
  r.precision = j.at("precision").get<std::vector<double>>();
  r.recall = j.at("recall").get<std::vector<double>>();
  r.f1 = j.at("f1").get<std::vector<double>>();
  r.weighted_precision = j.at("weighted_precision").get<double>();
  r.weighted_recall = j.at("weighted_recall").get<double>();
  r.weighted_f1 = j.at("weighted_f1").get<double>();
  r.accuracy = j.at("accuracy").get<double>();
  r.confusion = j.at("confusion").get<std::vector<std::vector<int>>>();
  return r;
}

}  // namespace toporec
