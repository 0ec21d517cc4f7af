#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gradecast/error.hpp"
#include "gradecast/linear.hpp"
#include "gradecast/metrics.hpp"
#include "oracles.hpp"
#include "validation_table.hpp"

using namespace gradecast;

namespace {

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

std::vector<double> actual_grades() {
  return {std::begin(validation::kActual), std::end(validation::kActual)};
}

std::vector<double> column(int c) {
  std::vector<double> out;
  for (const auto& row : validation::kPredicted) out.push_back(row[c]);
  return out;
}

}  // namespace

TEST_CASE("mae basics") {
  CHECK(mae(PredictionPairs({1, 2, 3}, {1, 2, 3})) == 0.0);
  CHECK(mae(PredictionPairs({2, 3, 4}, {1, 2, 3})) == 1.0);
  CHECK(kind_of([] { PredictionPairs({}, {}); }) == ErrorKind::EmptyPairs);
  CHECK(kind_of([] { PredictionPairs({1}, {1, 2}); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { PredictionPairs({std::nan("")}, {1}); }) == ErrorKind::NonFiniteInput);
}

TEST_CASE("validation table columns against hand-summed oracles") {
  const auto a = actual_grades();
  for (int c = 0; c < 4; ++c) {
    CAPTURE(c);
    const PredictionPairs p(column(c), a);
    CHECK(mae(p) == doctest::Approx(validation::kExpectedMae[c]).epsilon(1e-9));
    CHECK(mae(p) == doctest::Approx(oracle::naive_mae(column(c), a)).epsilon(1e-12));
    CHECK(rae(p) == doctest::Approx(oracle::naive_rae(column(c), a)).epsilon(1e-12));
    CHECK(rrse(p) == doctest::Approx(oracle::naive_rrse(column(c), a)).epsilon(1e-12));
  }
  // |4.0124-4| + |5.9675-6| + ... summed by hand = 1.2143
  CHECK(std::fabs(mae(PredictionPairs(column(1), a)) - 0.12143) < 1e-5);
  // denominator for RAE: mean grade 5.3, sum |T - 5.3| = 7.0
  CHECK(std::fabs(rae(PredictionPairs(column(1), a)) - 100.0 * 1.2143 / 7.0) < 1e-4);
}

TEST_CASE("rmse basics") {
  CHECK(rmse(PredictionPairs({1, 2}, {1, 2})) == 0.0);
  CHECK(rmse(PredictionPairs({3, 4}, {0, 0})) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
}

TEST_CASE("relative errors") {
  const std::vector<double> a{1, 2, 3, 6};
  const std::vector<double> mean_pred(4, 3.0);
  CHECK(rae(PredictionPairs(mean_pred, a)) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(rrse(PredictionPairs(mean_pred, a)) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(rae(PredictionPairs(a, a)) == 0.0);
  CHECK(rrse(PredictionPairs(a, a)) == 0.0);
  CHECK(kind_of([] { rae(PredictionPairs({1, 2}, {3, 3})); }) == ErrorKind::ZeroDenominator);
  CHECK(kind_of([] { rrse(PredictionPairs({1, 2}, {3, 3})); }) == ErrorKind::ZeroDenominator);
}

TEST_CASE("correlation") {
  const std::vector<double> a{1, 4, 2, 8};
  CHECK(*correlation(PredictionPairs(a, a)) == doctest::Approx(1.0));
  CHECK(*correlation(PredictionPairs({-1, -4, -2, -8}, a)) == doctest::Approx(-1.0));
  CHECK_FALSE(correlation(PredictionPairs({2, 2, 2, 2}, a)));
  CHECK_FALSE(correlation(PredictionPairs({7}, {3})));
}

TEST_CASE("random vectors agree with two-pass references and the invariances") {
  std::mt19937_64 rng(1000);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_int_distribution<int> len(2, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = len(rng);
    std::vector<double> p(n), a(n);
    for (int i = 0; i < n; ++i) {
      a[i] = g(rng);
      p[i] = a[i] + g(rng);
    }
    const PredictionPairs pairs(p, a);
    CHECK(rmse(pairs) >= mae(pairs));
    CHECK(mae(pairs) == doctest::Approx(oracle::naive_mae(p, a)).epsilon(1e-10));
    CHECK(rmse(pairs) == doctest::Approx(oracle::naive_rmse(p, a)).epsilon(1e-10));
    CHECK(rae(pairs) == doctest::Approx(oracle::naive_rae(p, a)).epsilon(1e-10));
    CHECK(rrse(pairs) == doctest::Approx(oracle::naive_rrse(p, a)).epsilon(1e-10));
    CHECK(*correlation(pairs) == doctest::Approx(oracle::naive_pearson(p, a)).epsilon(1e-10));

    std::vector<double> ps(n), as(n), pm(n), am(n);
    for (int i = 0; i < n; ++i) {
      ps[i] = p[i] + 7.5, as[i] = a[i] + 7.5;
      pm[i] = -3.0 * p[i], am[i] = -3.0 * a[i];
    }
    CHECK(rae(PredictionPairs(ps, as)) == doctest::Approx(rae(pairs)).epsilon(1e-9));
    CHECK(rrse(PredictionPairs(ps, as)) == doctest::Approx(rrse(pairs)).epsilon(1e-9));
    CHECK(rae(PredictionPairs(pm, am)) == doctest::Approx(rae(pairs)).epsilon(1e-9));
    CHECK(rrse(PredictionPairs(pm, am)) == doctest::Approx(rrse(pairs)).epsilon(1e-9));
    CHECK(mae(PredictionPairs(pm, am)) == doctest::Approx(3.0 * mae(pairs)).epsilon(1e-12));
    CHECK(rmse(PredictionPairs(pm, am)) == doctest::Approx(3.0 * rmse(pairs)).epsilon(1e-12));
  }
}

TEST_CASE("rmse equals mae exactly when all errors have the same size") {
  const PredictionPairs p({1, -1, 3}, {0, 0, 2});
  CHECK(rmse(p) == doctest::Approx(mae(p)).epsilon(1e-15));
}

TEST_CASE("evaluate") {
  const Dataset d({"x"}, {Sample{{0}, 1}, Sample{{1}, 3}, Sample{{2}, 5}, Sample{{3}, 7}}, Granularity::Variable);
  const auto [m, diag] = fit_ols(d, d.feature_names());
  const auto report = evaluate([&](const FeatureMap& x) { return predict_linear(m, x); }, d);
  CHECK(report.mae < 1e-12);
  CHECK(report.rmse < 1e-12);
  CHECK(*report.correlation == doctest::Approx(1.0));

  const auto baseline = evaluate([](const FeatureMap&) { return 4.0; }, d, EvaluateOptions{1.25, false});
  CHECK(baseline.rae_percent == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(baseline.rrse_percent == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_FALSE(baseline.correlation);
  CHECK(baseline.build_time_s == 0.0);
  CHECK(baseline.test_time_s == 0.0);

  const auto doc = baseline.to_json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"mae", "rmse", "rae_percent", "rrse_percent", "correlation",
                                         "build_time_s", "test_time_s"});
  CHECK(doc["correlation"].is_null());

  const auto timed = evaluate([](const FeatureMap&) { return 4.0; }, d, EvaluateOptions{0.0123456, true});
  CHECK(timed.build_time_s == 0.012);
  CHECK(timed.test_time_s >= 0.0);
}
