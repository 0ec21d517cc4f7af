#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradecast/dataset.hpp"
#include "gradecast/linear.hpp"

namespace gradecast {

// The six published student-performance models. The "first" tree models are
// early refinements kept for inspection; prediction front ends offer only the
// four final ones.
enum class PaperModelId {
  LrcVariable,
  LrcFactor,
  M5pVariableFinal,
  M5pFactorFinal,
  M5pVariableFirst,
  M5pFactorFirst,
};

struct PaperModelInfo {
  PaperModelId id;
  std::string_view name;  // "lrc_variable", ...
  Granularity granularity;
  std::string_view description;
};

const PaperModelInfo& paper_model_info(PaperModelId id);
std::string_view to_string(PaperModelId id);
std::optional<PaperModelId> parse_paper_model(std::string_view name);
std::array<PaperModelId, 6> all_paper_models();
std::array<PaperModelId, 4> final_paper_models();

// Coefficients as published; variables with no published term are absent.
const LinearModel& builtin_model(PaperModelId id);

// "grade = 0.0444*x1 + 0.3166*x2 - ... + 9.8865"
std::string render_equation(const LinearModel& m);

struct PaperPrediction {
  double raw = 0.0;
  double clamped = 0.0;
};

PaperPrediction predict_paper(PaperModelId id, const FeatureMap& responses, const GradeBounds& bounds = {});

struct SignificanceReport {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
  std::vector<std::string> insignificant;
};

// Sorts every universe feature by the sign of its coefficient; features the
// model lacks (or weights by exactly zero) are insignificant.
SignificanceReport classify_significance(const LinearModel& m, std::span<const std::string> universe);

// Hex SHA-256 over the sorted "name=value" lines of a model's terms followed
// by its intercept. Term order does not affect the digest.
std::string coefficient_digest(const LinearModel& m);

}  // namespace gradecast
