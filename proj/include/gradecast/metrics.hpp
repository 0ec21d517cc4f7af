#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "gradecast/dataset.hpp"

namespace gradecast {

// Predicted/actual pairs of equal, non-zero length with finite entries.
class PredictionPairs {
 public:
  PredictionPairs(std::vector<double> predicted, std::vector<double> actual);

  std::span<const double> predicted() const noexcept { return predicted_; }
  std::span<const double> actual() const noexcept { return actual_; }
  std::size_t size() const noexcept { return actual_.size(); }

 private:
  std::vector<double> predicted_;
  std::vector<double> actual_;
};

double mae(const PredictionPairs& p);
double rmse(const PredictionPairs& p);
// Relative absolute error in percent; ZeroDenominator when actuals are constant.
double rae(const PredictionPairs& p);
// Root relative squared error in percent.
double rrse(const PredictionPairs& p);
// Pearson r; nullopt when either side has zero variance.
std::optional<double> correlation(const PredictionPairs& p);

struct EvaluationReport {
  double mae = 0.0;
  double rmse = 0.0;
  double rae_percent = 0.0;
  double rrse_percent = 0.0;
  std::optional<double> correlation;
  double build_time_s = 0.0;
  double test_time_s = 0.0;

  // Keys in the order mae, rmse, rae_percent, rrse_percent, correlation,
  // build_time_s, test_time_s; an undefined correlation is null.
  nlohmann::ordered_json to_json() const;
};

using Predictor = std::function<double(const FeatureMap&)>;

struct EvaluateOptions {
  std::optional<double> build_time_s;
  bool record_timing = true;
};

// Runs the predictor over every test row. Timings are monotonic wall clock
// rounded to milliseconds; with record_timing off both are reported as 0.
EvaluationReport evaluate(const Predictor& model, const Dataset& test, const EvaluateOptions& options = {});

}  // namespace gradecast
