#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gradecast/schema.hpp"

namespace gradecast {

using FeatureMap = std::map<std::string, double>;

enum class Granularity { Variable, Factor };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view text);

struct Sample {
  std::vector<double> features;  // aligned with Dataset::feature_names()
  double target = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Row-oriented numeric table. Every sample carries exactly one value per
// declared feature name.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, std::vector<Sample> samples,
          Granularity granularity);

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  Granularity granularity() const noexcept { return granularity_; }

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t feature_count() const noexcept { return feature_names_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  // Column position of a feature; throws Error(MissingFeature).
  std::size_t feature_index(std::string_view name) const;
  bool has_feature(std::string_view name) const;

  double value(std::size_t row, std::size_t feature) const { return samples_[row].features[feature]; }
  std::vector<double> column(std::size_t feature) const;
  std::vector<double> targets() const;
  FeatureMap feature_map(std::size_t row) const;

  // Rows in the given order (indices may repeat).
  Dataset subset(std::span<const std::size_t> rows) const;
  // Keeps only the named features, in the given order.
  Dataset select_features(std::span<const std::string> names) const;

  nlohmann::ordered_json to_json() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::string> feature_names_;
  std::vector<Sample> samples_;
  Granularity granularity_ = Granularity::Variable;
};

struct CsvOptions {
  GradeBounds grade_bounds{};
  // When false, cells are only required to be finite numbers.
  bool check_scale = true;
};

// Header must hold x1..x70 or the 21 lowercase factor codes (any order) plus
// "grade". Columns are stored in canonical order (x1..x70 or ssh..fpg).
Dataset load_csv(std::istream& in, const QuestionnaireSchema& schema, const CsvOptions& options = {});
Dataset load_csv_file(const std::string& path, const QuestionnaireSchema& schema,
                      const CsvOptions& options = {});

// Writes feature columns in dataset order followed by "grade". Values use the
// shortest round-trip decimal representation.
void write_csv(std::ostream& out, const Dataset& d);

// Sums member variables into the 21 factor scores; target is copied.
Dataset aggregate_factors(const Dataset& d, const QuestionnaireSchema& schema);
// Same aggregation for a single response map keyed by "x1".."x70".
FeatureMap aggregate_factors(const FeatureMap& responses, const QuestionnaireSchema& schema);

enum class Normalization { None, MinMax };

Dataset normalize(const Dataset& d, Normalization method);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
};

// Seeded partition. The permutation is a Fisher-Yates pass driven by
// std::mt19937_64 (j = draw mod (i + 1), i from n-1 down to 1); the first
// round(train_fraction * n) permuted rows, clamped to [1, n-1], form the
// training half. Both halves keep the original row order.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, const SplitSpec& spec);

}  // namespace gradecast
