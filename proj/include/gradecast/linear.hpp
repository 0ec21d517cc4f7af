#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gradecast/dataset.hpp"

namespace gradecast {

// intercept + sum(coefficient * value). Features absent from the term list
// contribute nothing.
class LinearModel {
 public:
  using Term = std::pair<std::string, double>;

  LinearModel() = default;
  LinearModel(double intercept, std::vector<Term> terms);

  double intercept() const noexcept { return intercept_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::optional<double> coefficient(std::string_view name) const;
  std::vector<std::string> feature_order() const;
  // coefficients plus intercept
  std::size_t parameter_count() const noexcept { return terms_.size() + 1; }

  // {"intercept": ..., "coefficients": {"x1": ..., ...}} in term order.
  nlohmann::ordered_json to_json() const;
  static LinearModel from_json(const nlohmann::ordered_json& doc);

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  double intercept_ = 0.0;
  std::vector<Term> terms_;
};

struct FitDiagnostics {
  double residual_sum_squares = 0.0;
  bool rank_deficient = false;
  double ridge_used = 0.0;
};

// A normal matrix whose eigenvalue ratio exceeds this is treated as singular.
inline constexpr double kConditionLimit = 1e12;
// Ridge added in the singular case, relative to trace / dimension.
inline constexpr double kRidgeScale = 1e-8;

// Least squares over the named features. Regressors are centred before the
// normal equations are formed, so the intercept is never penalised. Throws
// TooFewSamples when d has fewer than features + 1 rows.
std::pair<LinearModel, FitDiagnostics> fit_ols(const Dataset& d, std::span<const std::string> features);

// Throws Error(MissingFeature) naming the first absent feature.
double predict_linear(const LinearModel& m, const FeatureMap& x);

// Column positions of a model's features within a dataset, for row-wise prediction.
std::vector<std::size_t> bind_columns(const LinearModel& m, const Dataset& d);
double predict_row(const LinearModel& m, std::span<const std::size_t> columns, const Sample& s);

namespace detail {

// Same solver as fit_ols without the sample-count precondition: row subsets
// smaller than the regressor count fall through to the ridge branch.
std::pair<LinearModel, FitDiagnostics> fit_rows(const Dataset& d, std::span<const std::size_t> rows,
                                                std::span<const std::size_t> columns);

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear regression classification: each class is the span of its training
// vectors, a probe goes to the class whose least-squares reconstruction is
// closest.

using ClassLabel = double;

struct ClassModel {
  ClassLabel label = 0.0;
  Eigen::MatrixXd columns;  // q x p_i, one column per training vector
};

class LrcState {
 public:
  struct Entry {
    ClassLabel label;
    Eigen::MatrixXd columns;
    Eigen::LDLT<Eigen::MatrixXd> normal;  // factorisation of X^T X (+ ridge)
    double ridge;
  };

  explicit LrcState(std::vector<Entry> entries);

  std::size_t dimension() const noexcept;
  const std::vector<Entry>& classes() const noexcept { return entries_; }
  // X_i * beta_i for the probe y.
  Eigen::VectorXd reconstruct(std::size_t class_index, const Eigen::VectorXd& y) const;

 private:
  std::vector<Entry> entries_;  // sorted by label
};

struct LrcResult {
  ClassLabel label = 0.0;
  std::map<ClassLabel, double> distances;
};

// Needs at least two classes of equal dimension q. A class whose normal matrix
// stays singular after the ridge (all-zero columns) raises SingularClassModel.
LrcState lrc_fit(std::vector<ClassModel> classes);

// Minimum-distance class; equal distances resolve to the smallest label.
LrcResult lrc_classify(const LrcState& state, const Eigen::VectorXd& y);

// LRC bound to named features, built from a dataset with one class per
// distinct target value.
class LrcModel {
 public:
  LrcModel(std::vector<std::string> features, std::vector<ClassModel> classes);

  static LrcModel fit(const Dataset& d);

  const std::vector<std::string>& features() const noexcept { return features_; }
  const std::vector<ClassModel>& class_models() const noexcept { return classes_; }
  const LrcState& state() const noexcept { return state_; }

  LrcResult classify(const FeatureMap& x) const;
  double predict(const FeatureMap& x) const { return classify(x).label; }

  nlohmann::ordered_json to_json() const;
  static LrcModel from_json(const nlohmann::ordered_json& doc);

 private:
  std::vector<std::string> features_;
  std::vector<ClassModel> classes_;
  LrcState state_;
};

}  // namespace gradecast
