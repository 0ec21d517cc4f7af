#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "gradecast/dataset.hpp"
#include "gradecast/error.hpp"

using namespace gradecast;

namespace {

std::string variable_header() {
  std::string h;
  for (const auto& n : variable_names()) h += n + ",";
  return h + "grade\n";
}

std::string constant_row(int value, double grade) {
  std::string r;
  for (int i = 0; i < kVariableCount; ++i) r += std::to_string(value) + ",";
  std::ostringstream g;
  g << grade;
  return r + g.str() + "\n";
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected gradecast::Error");
  return ErrorKind::InvalidArgument;
}

Dataset random_variable_dataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> answer(1, 5);
  std::uniform_real_distribution<double> grade(0.0, 7.0);
  std::vector<Sample> rows;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    for (int j = 0; j < kVariableCount; ++j) s.features.push_back(answer(rng));
    s.target = grade(rng);
    rows.push_back(std::move(s));
  }
  return Dataset(variable_names(), std::move(rows), Granularity::Variable);
}

}  // namespace

TEST_CASE("variable CSV with one row") {
  std::istringstream in(variable_header() + constant_row(3, 5));
  const auto d = load_csv(in, builtin_schema());
  CHECK(d.granularity() == Granularity::Variable);
  CHECK(d.size() == 1);
  CHECK(d.feature_count() == 70);
  CHECK(d.samples()[0].target == 5.0);
}

TEST_CASE("factor CSV header is detected") {
  std::string text;
  for (const auto& n : factor_names()) text += n + ",";
  text += "grade\n";
  for (auto code : all_factors()) {
    const auto& info = factor_info(code);
    text += std::to_string(info.last - info.first + 1) + ",";
  }
  text += "4\n";
  std::istringstream in(text);
  const auto d = load_csv(in, builtin_schema());
  CHECK(d.granularity() == Granularity::Factor);
  CHECK(d.feature_count() == 21);
  CHECK(d.value(0, d.feature_index("sat")) == 4.0);
}

TEST_CASE("columns in any order are stored canonically") {
  auto names = variable_names();
  std::reverse(names.begin(), names.end());
  std::string text = "grade,";
  for (const auto& n : names) text += n + (n == names.back() ? "\n" : ",");
  text += "6";
  for (int i = 70; i >= 1; --i) text += "," + std::to_string(1 + i % 5);
  text += "\n";
  std::istringstream in(text);
  const auto d = load_csv(in, builtin_schema());
  CHECK(d.feature_names().front() == "x1");
  CHECK(d.value(0, 0) == 1 + 1 % 5);
  CHECK(d.value(0, 69) == 1 + 70 % 5);
  CHECK(d.samples()[0].target == 6.0);
}

TEST_CASE("bad cells carry row and column") {
  std::string row = constant_row(2, 4);
  row.replace(4, 1, "abc");  // third value: x3
  std::istringstream in(variable_header() + constant_row(2, 4) + row);
  try {
    load_csv(in, builtin_schema());
    FAIL("expected NonNumericCell");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonNumericCell);
    CHECK(e.row() == 2u);
    CHECK(e.column() == "x3");
  }
}

TEST_CASE("out-of-scale values are rejected") {
  std::istringstream likert(variable_header() + constant_row(6, 4));
  CHECK(kind_of([&] { load_csv(likert, builtin_schema()); }) == ErrorKind::OutOfScaleValue);

  std::istringstream grade(variable_header() + constant_row(3, 7.5));
  CHECK(kind_of([&] { load_csv(grade, builtin_schema()); }) == ErrorKind::OutOfScaleValue);

  std::istringstream relaxed(variable_header() + constant_row(0, 9));
  CsvOptions opts;
  opts.check_scale = false;
  CHECK(load_csv(relaxed, builtin_schema(), opts).value(0, 0) == 0.0);
}

TEST_CASE("header problems") {
  std::string h = variable_header();
  std::istringstream missing(h.substr(h.find(',') + 1) + "1,1\n");
  CHECK(kind_of([&] { load_csv(missing, builtin_schema()); }) == ErrorKind::MissingColumn);

  std::istringstream empty("");
  CHECK(kind_of([&] { load_csv(empty, builtin_schema()); }) == ErrorKind::EmptyDataset);

  std::istringstream header_only(variable_header());
  CHECK(kind_of([&] { load_csv(header_only, builtin_schema()); }) == ErrorKind::EmptyDataset);

  std::istringstream unknown("foo," + variable_header());
  CHECK(kind_of([&] { load_csv(unknown, builtin_schema()); }) == ErrorKind::ParseError);
}

TEST_CASE("CSV round trip") {
  const auto d = random_variable_dataset(25, 7);
  std::ostringstream out;
  write_csv(out, d);
  std::istringstream in(out.str());
  CHECK(load_csv(in, builtin_schema()) == d);

  const auto f = aggregate_factors(d, builtin_schema());
  std::ostringstream fout;
  write_csv(fout, f);
  std::istringstream fin(fout.str());
  CHECK(load_csv(fin, builtin_schema()) == f);
}

TEST_CASE("factor aggregation sums member variables") {
  std::vector<double> x(70, 3.0);
  x[0] = x[1] = x[2] = 0.0;  // ssh members
  x[9] = 1, x[10] = 2, x[11] = 3, x[12] = 4;  // sat members
  const Dataset d(variable_names(), {Sample{x, 5.5}}, Granularity::Variable);
  const auto f = aggregate_factors(d, builtin_schema());
  CHECK(f.granularity() == Granularity::Factor);
  CHECK(f.feature_count() == 21);
  CHECK(f.value(0, f.feature_index("ssh")) == 0.0);
  CHECK(f.value(0, f.feature_index("sat")) == 10.0);
  CHECK(f.value(0, f.feature_index("lat")) == 12.0);
  CHECK(f.samples()[0].target == 5.5);

  CHECK(kind_of([&] { aggregate_factors(f, builtin_schema()); }) == ErrorKind::WrongGranularity);
}

TEST_CASE("factor aggregation is linear") {
  const auto d = random_variable_dataset(2, 11);
  std::vector<double> sum(70);
  for (int j = 0; j < 70; ++j) sum[j] = d.value(0, j) + d.value(1, j);
  const Dataset both(variable_names(), {Sample{sum, 0.0}}, Granularity::Variable);
  const auto fa = aggregate_factors(d, builtin_schema());
  const auto fs = aggregate_factors(both, builtin_schema());
  for (std::size_t j = 0; j < 21; ++j) CHECK(fs.value(0, j) == fa.value(0, j) + fa.value(1, j));
}

TEST_CASE("single response map aggregation matches the dataset path") {
  const auto d = random_variable_dataset(1, 3);
  const auto f = aggregate_factors(d, builtin_schema());
  const auto m = aggregate_factors(d.feature_map(0), builtin_schema());
  REQUIRE(m.size() == 21);
  for (std::size_t j = 0; j < 21; ++j) CHECK(m.at(f.feature_names()[j]) == f.value(0, j));

  auto partial = d.feature_map(0);
  partial.erase("x41");
  CHECK(kind_of([&] { aggregate_factors(partial, builtin_schema()); }) == ErrorKind::MissingFeature);
}

TEST_CASE("normalization") {
  const Dataset d({"a", "b"}, {Sample{{1, 7}, 1}, Sample{{3, 7}, 2}, Sample{{5, 7}, 3}}, Granularity::Variable);
  CHECK(normalize(d, Normalization::None) == d);
  CHECK(kind_of([&] { normalize(d, Normalization::MinMax); }) == ErrorKind::DegenerateFeature);

  const auto n = normalize(d.select_features(std::vector<std::string>{"a"}), Normalization::MinMax);
  CHECK(n.column(0) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(n.targets() == std::vector<double>{1, 2, 3});
}

TEST_CASE("train/test split") {
  const auto d = random_variable_dataset(10, 5);
  const auto [train, test] = split_train_test(d, SplitSpec{0.8, 42});
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);

  const auto [train2, test2] = split_train_test(d, SplitSpec{0.8, 42});
  CHECK(train == train2);
  CHECK(test == test2);

  auto merged = train.samples();
  merged.insert(merged.end(), test.samples().begin(), test.samples().end());
  auto original = d.samples();
  const auto by_value = [](const Sample& a, const Sample& b) {
    return std::tie(a.target, a.features) < std::tie(b.target, b.features);
  };
  std::sort(merged.begin(), merged.end(), by_value);
  std::sort(original.begin(), original.end(), by_value);
  CHECK(merged == original);

  CHECK(split_train_test(d, SplitSpec{0.01, 1}).first.size() == 1);
  CHECK(split_train_test(d, SplitSpec{0.99, 1}).second.size() == 1);

  const Dataset one(variable_names(), {d.samples()[0]}, Granularity::Variable);
  CHECK(kind_of([&] { split_train_test(one, SplitSpec{}); }) == ErrorKind::TooFewSamples);
  CHECK(kind_of([&] { split_train_test(d, SplitSpec{1.0, 1}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("dataset invariants") {
  CHECK(kind_of([] { Dataset({"a"}, {Sample{{1, 2}, 0}}, Granularity::Variable); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { Dataset({"a", "a"}, {}, Granularity::Variable); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Dataset({"a"}, {Sample{{std::nan("")}, 0}}, Granularity::Variable); }) ==
        ErrorKind::NonFiniteInput);
  const Dataset d({"a"}, {Sample{{1}, 0}}, Granularity::Variable);
  CHECK(kind_of([&] { (void)d.feature_index("b"); }) == ErrorKind::MissingFeature);
  CHECK(d.to_json()["granularity"] == "variable");
}
