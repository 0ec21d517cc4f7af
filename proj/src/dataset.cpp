#include "gradecast/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include "gradecast/error.hpp"
#include "gradecast/format.hpp"

namespace gradecast {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::string_view to_string(Granularity g) {
  return g == Granularity::Variable ? "variable" : "factor";
}

Granularity parse_granularity(std::string_view text) {
  if (text == "variable") return Granularity::Variable;
  if (text == "factor") return Granularity::Factor;
  throw Error(ErrorKind::InvalidArgument,
              "granularity must be 'variable' or 'factor', got '" + std::string(text) + "'");
}

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<Sample> samples,
                 Granularity granularity)
    : feature_names_(std::move(feature_names)), samples_(std::move(samples)), granularity_(granularity) {
  std::set<std::string_view> seen;
  for (const auto& name : feature_names_) {
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate feature name: " + name);
    }
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.features.size() != feature_names_.size()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sample " + std::to_string(i + 1) + " has " + std::to_string(s.features.size()) +
                      " features, expected " + std::to_string(feature_names_.size()));
    }
    if (!std::isfinite(s.target) ||
        !std::all_of(s.features.begin(), s.features.end(), [](double v) { return std::isfinite(v); })) {
      throw Error(ErrorKind::NonFiniteInput, "sample " + std::to_string(i + 1) + " holds a non-finite value");
    }
  }
}

std::size_t Dataset::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    if (feature_names_[i] == name) return i;
  }
  throw Error(ErrorKind::MissingFeature, "missing feature: " + std::string(name));
}

bool Dataset::has_feature(std::string_view name) const {
  return std::find(feature_names_.begin(), feature_names_.end(), name) != feature_names_.end();
}

std::vector<double> Dataset::column(std::size_t feature) const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.features[feature]);
  return out;
}

std::vector<double> Dataset::targets() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.target);
  return out;
}

FeatureMap Dataset::feature_map(std::size_t row) const {
  FeatureMap out;
  const auto& s = samples_.at(row);
  for (std::size_t j = 0; j < feature_names_.size(); ++j) out.emplace(feature_names_[j], s.features[j]);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Sample> picked;
  picked.reserve(rows.size());
  for (auto r : rows) picked.push_back(samples_.at(r));
  Dataset out;
  out.feature_names_ = feature_names_;
  out.samples_ = std::move(picked);
  out.granularity_ = granularity_;
  return out;
}

Dataset Dataset::select_features(std::span<const std::string> names) const {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(feature_index(n));
  std::vector<Sample> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) {
    Sample t;
    t.target = s.target;
    t.features.reserve(cols.size());
    for (auto c : cols) t.features.push_back(s.features[c]);
    out.push_back(std::move(t));
  }
  return Dataset({names.begin(), names.end()}, std::move(out), granularity_);
}

nlohmann::ordered_json Dataset::to_json() const {
  nlohmann::ordered_json doc;
  doc["granularity"] = std::string(to_string(granularity_));
  doc["feature_names"] = feature_names_;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : samples_) {
    nlohmann::ordered_json row;
    nlohmann::ordered_json features;
    for (std::size_t j = 0; j < feature_names_.size(); ++j) features[feature_names_[j]] = s.features[j];
    row["features"] = std::move(features);
    row["grade"] = s.target;
    rows.push_back(std::move(row));
  }
  doc["samples"] = std::move(rows);
  return doc;
}

Dataset load_csv(std::istream& in, const QuestionnaireSchema& schema, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw Error(ErrorKind::EmptyDataset, "CSV input is empty");
  }
  // tolerate a UTF-8 byte order mark
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  const auto header = split_commas(line);
  bool any_variable = false;
  bool any_factor = false;
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(header[c]);
    if (!position.emplace(name, c).second) {
      throw Error(ErrorKind::ParseError, "duplicate CSV column: " + name);
    }
    if (name == "grade") continue;
    if (VariableId::parse(name)) {
      any_variable = true;
    } else if (auto f = parse_factor(name); f && name == factor_info(*f).lower) {
      any_factor = true;
    } else {
      throw Error(ErrorKind::ParseError, "unexpected CSV column: " + name);
    }
  }
  if (any_variable && any_factor) {
    throw Error(ErrorKind::ParseError, "CSV header mixes variable and factor columns");
  }
  const Granularity granularity = any_factor ? Granularity::Factor : Granularity::Variable;
  const auto names = granularity == Granularity::Variable ? variable_names() : factor_names();
  for (const auto& n : names) {
    if (!position.contains(n)) throw Error(ErrorKind::MissingColumn, "missing column: " + n, 0, n);
  }
  if (!position.contains("grade")) {
    throw Error(ErrorKind::MissingColumn, "missing column: grade", 0, "grade");
  }

  // per-feature admissible range
  std::vector<std::pair<double, double>> range;
  range.reserve(names.size());
  const auto& scale = schema.scale();
  for (const auto& n : names) {
    double members = 1.0;
    if (granularity == Granularity::Factor) {
      const auto& info = factor_info(*parse_factor(n));
      members = info.last - info.first + 1;
    }
    range.emplace_back(members * scale.min, members * scale.max);
  }

  std::vector<Sample> samples;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::ParseError,
                  "row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()),
                  row, "");
    }
    Sample s;
    s.features.reserve(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto cell = cells[position.at(names[j])];
      auto v = parse_number(cell);
      if (!v) {
        throw Error(ErrorKind::NonNumericCell,
                    "row " + std::to_string(row) + ", column " + names[j] + ": '" + std::string(cell) +
                        "' is not a number",
                    row, names[j]);
      }
      if (options.check_scale && (*v < range[j].first || *v > range[j].second)) {
        throw Error(ErrorKind::OutOfScaleValue,
                    "row " + std::to_string(row) + ", column " + names[j] + ": " + format_number(*v) +
                        " outside [" + format_number(range[j].first) + ", " + format_number(range[j].second) + "]",
                    row, names[j]);
      }
      s.features.push_back(*v);
    }
    const auto grade_cell = cells[position.at("grade")];
    auto grade = parse_number(grade_cell);
    if (!grade) {
      throw Error(ErrorKind::NonNumericCell,
                  "row " + std::to_string(row) + ", column grade: '" + std::string(grade_cell) + "' is not a number",
                  row, "grade");
    }
    if (options.check_scale && !options.grade_bounds.contains(*grade)) {
      throw Error(ErrorKind::OutOfScaleValue,
                  "row " + std::to_string(row) + ", column grade: " + format_number(*grade) + " outside [" +
                      format_number(options.grade_bounds.min) + ", " + format_number(options.grade_bounds.max) + "]",
                  row, "grade");
    }
    s.target = *grade;
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw Error(ErrorKind::EmptyDataset, "CSV input has a header but no data rows");
  return Dataset(names, std::move(samples), granularity);
}

Dataset load_csv_file(const std::string& path, const QuestionnaireSchema& schema, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open CSV file: " + path);
  return load_csv(in, schema, options);
}

void write_csv(std::ostream& out, const Dataset& d) {
  for (const auto& n : d.feature_names()) out << n << ',';
  out << "grade\n";
  for (const auto& s : d.samples()) {
    for (double v : s.features) out << format_number(v) << ',';
    out << format_number(s.target) << '\n';
  }
}

Dataset aggregate_factors(const Dataset& d, const QuestionnaireSchema& schema) {
  if (d.granularity() != Granularity::Variable) {
    throw Error(ErrorKind::WrongGranularity, "factor aggregation needs a variable-level dataset");
  }
  // member column positions per factor
  std::vector<std::vector<std::size_t>> members;
  for (auto code : all_factors()) {
    std::vector<std::size_t> cols;
    for (auto id : factor_members(schema, code)) cols.push_back(d.feature_index(id.str()));
    members.push_back(std::move(cols));
  }
  std::vector<Sample> out;
  out.reserve(d.size());
  for (const auto& s : d.samples()) {
    Sample t;
    t.target = s.target;
    t.features.reserve(members.size());
    for (const auto& cols : members) {
      double sum = 0.0;
      for (auto c : cols) sum += s.features[c];
      t.features.push_back(sum);
    }
    out.push_back(std::move(t));
  }
  return Dataset(factor_names(), std::move(out), Granularity::Factor);
}

FeatureMap aggregate_factors(const FeatureMap& responses, const QuestionnaireSchema& schema) {
  FeatureMap out;
  for (auto code : all_factors()) {
    double sum = 0.0;
    for (auto id : factor_members(schema, code)) {
      auto it = responses.find(id.str());
      if (it == responses.end()) throw Error(ErrorKind::MissingFeature, "missing feature: " + id.str());
      sum += it->second;
    }
    out.emplace(std::string(factor_info(code).lower), sum);
  }
  return out;
}

Dataset normalize(const Dataset& d, Normalization method) {
  if (method == Normalization::None) return d;
  std::vector<double> lo(d.feature_count()), hi(d.feature_count());
  for (std::size_t j = 0; j < d.feature_count(); ++j) {
    const auto col = d.column(j);
    if (col.empty()) break;
    auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    lo[j] = *mn;
    hi[j] = *mx;
    if (!(hi[j] > lo[j])) {
      throw Error(ErrorKind::DegenerateFeature, "feature " + d.feature_names()[j] + " is constant");
    }
  }
  std::vector<Sample> out = d.samples();
  for (auto& s : out) {
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      s.features[j] = (s.features[j] - lo[j]) / (hi[j] - lo[j]);
    }
  }
  return Dataset(d.feature_names(), std::move(out), d.granularity());
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = d.size();
  if (n < 2) throw Error(ErrorKind::TooFewSamples, "splitting needs at least 2 samples");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  auto train_n = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  train_n = std::clamp<std::size_t>(train_n, 1, n - 1);

  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_n));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(train_n), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {d.subset(train), d.subset(test)};
}

}  // namespace gradecast
