#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gradecast/dataset.hpp"
#include "gradecast/linear.hpp"
#include "gradecast/model_tree.hpp"
#include "gradecast/schema.hpp"

namespace gradecast {

// Any trained or published predictor that can live in a model file.
class Model {
 public:
  using Variant = std::variant<LinearModel, ModelTree, LrcModel>;

  Model(LinearModel m) : value_(std::move(m)) {}
  Model(ModelTree t) : value_(std::move(t)) {}
  Model(LrcModel m) : value_(std::move(m)) {}

  const Variant& value() const noexcept { return value_; }
  // "linear", "m5p" or "lrc"
  std::string_view kind() const noexcept;
  // Features a prediction reads.
  std::vector<std::string> features() const;
  // Variable or factor when every feature belongs to one family.
  std::optional<Granularity> granularity() const;

  double predict(const FeatureMap& x) const;

  // Linear models use the bare {"intercept", "coefficients"} layout; trees
  // and LRC models carry a "kind" tag.
  nlohmann::ordered_json to_json() const;
  static Model from_json(const nlohmann::ordered_json& doc);

 private:
  Variant value_;
};

Model load_model_file(const std::string& path);

std::string dump_json(const nlohmann::ordered_json& doc, bool pretty = false);

// Granularity implied by a set of feature names, if they are homogeneous.
std::optional<Granularity> infer_granularity(const std::vector<std::string>& features);

struct RegisteredModel {
  std::string id;
  std::string description;
  std::string equation;  // rendered formula for linear models, empty otherwise
  Model model;
  bool published = false;
};

class ModelRegistry {
 public:
  // The four final published models, plus the two early refinements when asked.
  static ModelRegistry published(bool include_first_refinements = false);

  // Registers a model file as "custom:<file stem>".
  const RegisteredModel& add_custom(const std::string& path);
  const RegisteredModel* find(std::string_view id) const;
  const std::vector<RegisteredModel>& models() const noexcept { return models_; }

  // [{"id", "granularity", "description", "equation"}...]
  nlohmann::ordered_json list_json() const;

 private:
  std::vector<RegisteredModel> models_;
};

// A published model id (all six are accepted) or a model file path.
RegisteredModel resolve_model(std::string_view id_or_path);

struct PredictionOutcome {
  double raw = 0.0;
  double clamped = 0.0;
  std::string model;
  std::optional<FeatureMap> factor_values;  // set when variable answers were summed into factors

  nlohmann::ordered_json to_json(bool include_factor_values = true) const;
};

// Factor-level models fed with variable answers aggregate them first.
PredictionOutcome predict_with(const RegisteredModel& entry, const FeatureMap& inputs,
                               const QuestionnaireSchema& schema, const GradeBounds& bounds = {});

}  // namespace gradecast
