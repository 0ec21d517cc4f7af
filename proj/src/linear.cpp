#include "gradecast/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gradecast/error.hpp"
#include "gradecast/format.hpp"

namespace gradecast {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Smallest-to-largest eigenvalue ratio test on a symmetric PSD matrix.
bool ill_conditioned(const Eigen::MatrixXd& normal) {
  if (normal.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  if (!(hi > 0.0)) return true;
  return lo <= hi / kConditionLimit;
}

}  // namespace

LinearModel::LinearModel(double intercept, std::vector<Term> terms)
    : intercept_(intercept), terms_(std::move(terms)) {
  if (!std::isfinite(intercept_)) throw Error(ErrorKind::NonFiniteInput, "non-finite intercept");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!std::isfinite(terms_[i].second)) {
      throw Error(ErrorKind::NonFiniteInput, "non-finite coefficient for " + terms_[i].first);
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (terms_[j].first == terms_[i].first) {
        throw Error(ErrorKind::InvalidArgument, "duplicate coefficient for " + terms_[i].first);
      }
    }
  }
}

std::optional<double> LinearModel::coefficient(std::string_view name) const {
  for (const auto& [feature, value] : terms_) {
    if (feature == name) return value;
  }
  return std::nullopt;
}

std::vector<std::string> LinearModel::feature_order() const {
  std::vector<std::string> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.first);
  return out;
}

nlohmann::ordered_json LinearModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["intercept"] = intercept_;
  nlohmann::ordered_json coefficients = nlohmann::ordered_json::object();
  for (const auto& [feature, value] : terms_) coefficients[feature] = value;
  doc["coefficients"] = std::move(coefficients);
  return doc;
}

LinearModel LinearModel::from_json(const nlohmann::ordered_json& doc) {
  try {
    std::vector<Term> terms;
    if (doc.contains("coefficients")) {
      for (const auto& [key, value] : doc.at("coefficients").items()) {
        terms.emplace_back(key, value.get<double>());
      }
    }
    return LinearModel(doc.at("intercept").get<double>(), std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed linear model: ") + e.what());
  }
}

namespace detail {

std::pair<LinearModel, FitDiagnostics> fit_rows(const Dataset& d, std::span<const std::size_t> rows,
                                                std::span<const std::size_t> columns) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(columns.size());
  if (n == 0) throw Error(ErrorKind::TooFewSamples, "least squares needs at least one sample");

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = d.samples()[rows[static_cast<std::size_t>(i)]];
    y(i) = s.target;
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = s.features[columns[static_cast<std::size_t>(j)]];
  }
  if (!all_finite(x) || !y.allFinite()) {
    throw Error(ErrorKind::NonFiniteInput, "least squares input holds a non-finite value");
  }

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  FitDiagnostics diag;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (p > 0) {
    Eigen::MatrixXd normal = xc.transpose() * xc;
    const Eigen::VectorXd rhs = xc.transpose() * yc;
    const double trace = normal.trace();
    if (!(trace > 0.0)) {
      // every regressor is constant over these rows
      diag.rank_deficient = true;
    } else {
      if (ill_conditioned(normal)) {
        diag.rank_deficient = true;
        diag.ridge_used = kRidgeScale * trace / static_cast<double>(p);
        normal.diagonal().array() += diag.ridge_used;
      }
      beta = normal.ldlt().solve(rhs);
    }
  }

  const double intercept = y_mean - x_mean.dot(beta);
  const Eigen::VectorXd residual = y - (x * beta).array().matrix() - Eigen::VectorXd::Constant(n, intercept);
  diag.residual_sum_squares = residual.squaredNorm();

  std::vector<LinearModel::Term> terms;
  terms.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    terms.emplace_back(d.feature_names()[columns[static_cast<std::size_t>(j)]], beta(j));
  }
  return {LinearModel(intercept, std::move(terms)), diag};
}

}  // namespace detail

std::pair<LinearModel, FitDiagnostics> fit_ols(const Dataset& d, std::span<const std::string> features) {
  if (d.size() < features.size() + 1) {
    throw Error(ErrorKind::TooFewSamples, "least squares over " + std::to_string(features.size()) +
                                              " features needs at least " + std::to_string(features.size() + 1) +
                                              " samples, got " + std::to_string(d.size()));
  }
  std::vector<std::size_t> columns;
  columns.reserve(features.size());
  for (const auto& f : features) columns.push_back(d.feature_index(f));
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return detail::fit_rows(d, rows, columns);
}

double predict_linear(const LinearModel& m, const FeatureMap& x) {
  double sum = m.intercept();
  for (const auto& [feature, coefficient] : m.terms()) {
    auto it = x.find(feature);
    if (it == x.end()) throw Error(ErrorKind::MissingFeature, "missing feature: " + feature);
    sum += coefficient * it->second;
  }
  return sum;
}

std::vector<std::size_t> bind_columns(const LinearModel& m, const Dataset& d) {
  std::vector<std::size_t> out;
  out.reserve(m.terms().size());
  for (const auto& t : m.terms()) out.push_back(d.feature_index(t.first));
  return out;
}

double predict_row(const LinearModel& m, std::span<const std::size_t> columns, const Sample& s) {
  double sum = m.intercept();
  for (std::size_t j = 0; j < columns.size(); ++j) sum += m.terms()[j].second * s.features[columns[j]];
  return sum;
}

// ---------------------------------------------------------------------------

LrcState::LrcState(std::vector<Entry> entries) : entries_(std::move(entries)) {}

std::size_t LrcState::dimension() const noexcept {
  return entries_.empty() ? 0 : static_cast<std::size_t>(entries_.front().columns.rows());
}

Eigen::VectorXd LrcState::reconstruct(std::size_t class_index, const Eigen::VectorXd& y) const {
  const auto& e = entries_.at(class_index);
  const Eigen::VectorXd beta = e.normal.solve(e.columns.transpose() * y);
  return e.columns * beta;
}

LrcState lrc_fit(std::vector<ClassModel> classes) {
  if (classes.size() < 2) throw Error(ErrorKind::InvalidArgument, "linear regression classification needs >= 2 classes");
  std::sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  const auto q = classes.front().columns.rows();

  std::vector<LrcState::Entry> entries;
  entries.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    auto& c = classes[i];
    const std::string name = "class " + format_number(c.label);
    if (i > 0 && c.label == classes[i - 1].label) {
      throw Error(ErrorKind::InvalidArgument, "duplicate " + name);
    }
    if (c.columns.rows() != q) {
      throw Error(ErrorKind::DimensionMismatch, name + " has dimension " + std::to_string(c.columns.rows()) +
                                                    ", expected " + std::to_string(q));
    }
    if (c.columns.cols() < 1) throw Error(ErrorKind::InvalidArgument, name + " has no training vectors");
    if (!c.columns.allFinite()) throw Error(ErrorKind::NonFiniteInput, name + " holds a non-finite value");

    Eigen::MatrixXd normal = c.columns.transpose() * c.columns;
    const double trace = normal.trace();
    if (!(trace > 0.0)) {
      throw Error(ErrorKind::SingularClassModel, name + " has only zero columns");
    }
    double ridge = 0.0;
    if (ill_conditioned(normal)) {
      ridge = kRidgeScale * trace / static_cast<double>(normal.rows());
      normal.diagonal().array() += ridge;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SingularClassModel, name + " is singular");
    entries.push_back({c.label, std::move(c.columns), std::move(ldlt), ridge});
  }
  return LrcState(std::move(entries));
}

LrcResult lrc_classify(const LrcState& state, const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(y.size()) != state.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "probe has dimension " + std::to_string(y.size()) + ", expected " +
                                                  std::to_string(state.dimension()));
  }
  LrcResult result;
  double best = std::numeric_limits<double>::infinity();
  // classes are sorted by label, so strict < keeps the smallest label on ties
  for (std::size_t i = 0; i < state.classes().size(); ++i) {
    const double dist = (y - state.reconstruct(i, y)).norm();
    const auto label = state.classes()[i].label;
    result.distances.emplace(label, dist);
    if (dist < best) {
      best = dist;
      result.label = label;
    }
  }
  return result;
}

LrcModel::LrcModel(std::vector<std::string> features, std::vector<ClassModel> classes)
    : features_(std::move(features)), classes_(std::move(classes)), state_(lrc_fit(classes_)) {
  for (const auto& c : classes_) {
    if (static_cast<std::size_t>(c.columns.rows()) != features_.size()) {
      throw Error(ErrorKind::DimensionMismatch, "class vectors do not match the feature list");
    }
  }
}

LrcModel LrcModel::fit(const Dataset& d) {
  std::map<double, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < d.size(); ++i) by_label[d.samples()[i].target].push_back(i);
  std::vector<ClassModel> classes;
  const auto q = static_cast<Eigen::Index>(d.feature_count());
  for (const auto& [label, rows] : by_label) {
    ClassModel c{label, Eigen::MatrixXd(q, static_cast<Eigen::Index>(rows.size()))};
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& s = d.samples()[rows[k]];
      for (Eigen::Index j = 0; j < q; ++j) c.columns(j, static_cast<Eigen::Index>(k)) = s.features[static_cast<std::size_t>(j)];
    }
    classes.push_back(std::move(c));
  }
  return LrcModel(d.feature_names(), std::move(classes));
}

LrcResult LrcModel::classify(const FeatureMap& x) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(features_.size()));
  for (std::size_t j = 0; j < features_.size(); ++j) {
    auto it = x.find(features_[j]);
    if (it == x.end()) throw Error(ErrorKind::MissingFeature, "missing feature: " + features_[j]);
    y(static_cast<Eigen::Index>(j)) = it->second;
  }
  return lrc_classify(state_, y);
}

nlohmann::ordered_json LrcModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["kind"] = "lrc";
  doc["features"] = features_;
  auto classes = nlohmann::ordered_json::array();
  for (const auto& c : classes_) {
    nlohmann::ordered_json entry;
    entry["label"] = c.label;
    auto vectors = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < c.columns.cols(); ++k) {
      std::vector<double> v(c.columns.col(k).data(), c.columns.col(k).data() + c.columns.rows());
      vectors.push_back(std::move(v));
    }
    entry["vectors"] = std::move(vectors);
    classes.push_back(std::move(entry));
  }
  doc["classes"] = std::move(classes);
  return doc;
}

LrcModel LrcModel::from_json(const nlohmann::ordered_json& doc) {
  try {
    auto features = doc.at("features").get<std::vector<std::string>>();
    const auto q = static_cast<Eigen::Index>(features.size());
    std::vector<ClassModel> classes;
    for (const auto& entry : doc.at("classes")) {
      const auto& vectors = entry.at("vectors");
      ClassModel c{entry.at("label").get<double>(), Eigen::MatrixXd(q, static_cast<Eigen::Index>(vectors.size()))};
      Eigen::Index k = 0;
      for (const auto& v : vectors) {
        const auto values = v.get<std::vector<double>>();
        if (static_cast<Eigen::Index>(values.size()) != q) {
          throw Error(ErrorKind::DimensionMismatch, "class vector length does not match feature count");
        }
        for (Eigen::Index j = 0; j < q; ++j) c.columns(j, k) = values[static_cast<std::size_t>(j)];
        ++k;
      }
      classes.push_back(std::move(c));
    }
    return LrcModel(std::move(features), std::move(classes));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed LRC model: ") + e.what());
  }
}

}  // namespace gradecast
