#include "gradecast/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "gradecast/error.hpp"
#include "gradecast/format.hpp"

namespace gradecast {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

PredictionPairs::PredictionPairs(std::vector<double> predicted, std::vector<double> actual)
    : predicted_(std::move(predicted)), actual_(std::move(actual)) {
  if (predicted_.size() != actual_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "predicted and actual lengths differ");
  }
  if (actual_.empty()) throw Error(ErrorKind::EmptyPairs, "no prediction pairs");
  for (std::size_t i = 0; i < actual_.size(); ++i) {
    if (!std::isfinite(predicted_[i]) || !std::isfinite(actual_[i])) {
      throw Error(ErrorKind::NonFiniteInput, "non-finite value in prediction pair " + std::to_string(i + 1));
    }
  }
}

double mae(const PredictionPairs& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p.predicted()[i] - p.actual()[i]);
  return sum / static_cast<double>(p.size());
}

double rmse(const PredictionPairs& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p.predicted()[i] - p.actual()[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(p.size()));
}

double rae(const PredictionPairs& p) {
  const double t_bar = mean_of(p.actual());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    num += std::abs(p.predicted()[i] - p.actual()[i]);
    den += std::abs(p.actual()[i] - t_bar);
  }
  if (!(den > 0.0)) throw Error(ErrorKind::ZeroDenominator, "relative absolute error undefined for constant actuals");
  return 100.0 * num / den;
}

double rrse(const PredictionPairs& p) {
  const double t_bar = mean_of(p.actual());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p.predicted()[i] - p.actual()[i];
    const double dev = p.actual()[i] - t_bar;
    num += e * e;
    den += dev * dev;
  }
  if (!(den > 0.0)) {
    throw Error(ErrorKind::ZeroDenominator, "root relative squared error undefined for constant actuals");
  }
  return 100.0 * std::sqrt(num / den);
}

std::optional<double> correlation(const PredictionPairs& p) {
  if (p.size() < 2) return std::nullopt;
  const double mp = mean_of(p.predicted());
  const double ma = mean_of(p.actual());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dp = p.predicted()[i] - mp;
    const double da = p.actual()[i] - ma;
    sxy += dp * da;
    sxx += dp * dp;
    syy += da * da;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

nlohmann::ordered_json EvaluationReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["mae"] = mae;
  doc["rmse"] = rmse;
  doc["rae_percent"] = rae_percent;
  doc["rrse_percent"] = rrse_percent;
  doc["correlation"] = correlation ? nlohmann::ordered_json(*correlation) : nlohmann::ordered_json(nullptr);
  doc["build_time_s"] = build_time_s;
  doc["test_time_s"] = test_time_s;
  return doc;
}

EvaluationReport evaluate(const Predictor& model, const Dataset& test, const EvaluateOptions& options) {
  if (test.empty()) throw Error(ErrorKind::EmptyDataset, "evaluation needs at least one test sample");
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> predicted;
  predicted.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) predicted.push_back(model(test.feature_map(i)));
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  const PredictionPairs pairs(std::move(predicted), test.targets());
  EvaluationReport report;
  report.mae = mae(pairs);
  report.rmse = rmse(pairs);
  report.rae_percent = rae(pairs);
  report.rrse_percent = rrse(pairs);
  report.correlation = correlation(pairs);
  if (options.record_timing) {
    report.build_time_s = round_to(options.build_time_s.value_or(0.0), 3);
    report.test_time_s = round_to(elapsed.count(), 3);
  }
  return report;
}

}  // namespace gradecast
