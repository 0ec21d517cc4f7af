#include "gradecast/model.hpp"

#include <filesystem>
#include <fstream>

#include "gradecast/error.hpp"
#include "gradecast/paper_models.hpp"

namespace gradecast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool looks_like_variables(const FeatureMap& inputs) {
  for (const auto& [key, value] : inputs) {
    if (VariableId::parse(key)) return true;
  }
  return false;
}

}  // namespace

std::string_view Model::kind() const noexcept {
  return std::visit(overloaded{[](const LinearModel&) { return std::string_view("linear"); },
                               [](const ModelTree&) { return std::string_view("m5p"); },
                               [](const LrcModel&) { return std::string_view("lrc"); }},
                    value_);
}

std::vector<std::string> Model::features() const {
  return std::visit(overloaded{[](const LinearModel& m) { return m.feature_order(); },
                               [](const ModelTree& t) { return t.features; },
                               [](const LrcModel& m) { return m.features(); }},
                    value_);
}

std::optional<Granularity> Model::granularity() const { return infer_granularity(features()); }

double Model::predict(const FeatureMap& x) const {
  return std::visit(overloaded{[&](const LinearModel& m) { return predict_linear(m, x); },
                               [&](const ModelTree& t) { return predict_tree(t, x); },
                               [&](const LrcModel& m) { return m.predict(x); }},
                    value_);
}

nlohmann::ordered_json Model::to_json() const {
  return std::visit([](const auto& m) { return m.to_json(); }, value_);
}

Model Model::from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "model document must be a JSON object");
  const auto kind = doc.value("kind", std::string());
  if (kind == "m5p" || doc.contains("root")) return Model(ModelTree::from_json(doc));
  if (kind == "lrc" || doc.contains("classes")) return Model(LrcModel::from_json(doc));
  if (!kind.empty() && kind != "linear") throw Error(ErrorKind::ParseError, "unknown model kind: " + kind);
  return Model(LinearModel::from_json(doc));
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open model file: " + path);
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "model file " + path + " is not valid JSON: " + e.what());
  }
  return Model::from_json(doc);
}

std::string dump_json(const nlohmann::ordered_json& doc, bool pretty) {
  return pretty ? doc.dump(2) : doc.dump();
}

std::optional<Granularity> infer_granularity(const std::vector<std::string>& features) {
  if (features.empty()) return std::nullopt;
  bool variables = true, factors = true;
  for (const auto& f : features) {
    if (!VariableId::parse(f)) variables = false;
    const auto code = parse_factor(f);
    if (!code || factor_info(*code).lower != f) factors = false;
  }
  if (variables) return Granularity::Variable;
  if (factors) return Granularity::Factor;
  return std::nullopt;
}

ModelRegistry ModelRegistry::published(bool include_first_refinements) {
  ModelRegistry registry;
  const auto add = [&](PaperModelId id) {
    const auto& info = paper_model_info(id);
    const auto& m = builtin_model(id);
    registry.models_.push_back({std::string(info.name), std::string(info.description), render_equation(m), Model(m), true});
  };
  for (auto id : final_paper_models()) add(id);
  if (include_first_refinements) {
    add(PaperModelId::M5pVariableFirst);
    add(PaperModelId::M5pFactorFirst);
  }
  return registry;
}

const RegisteredModel& ModelRegistry::add_custom(const std::string& path) {
  auto model = load_model_file(path);
  std::string id = "custom:" + std::filesystem::path(path).stem().string();
  if (find(id) != nullptr) throw Error(ErrorKind::InvalidArgument, "model id already registered: " + id);
  std::string equation;
  if (const auto* linear = std::get_if<LinearModel>(&model.value())) equation = render_equation(*linear);
  std::string description = "Custom " + std::string(model.kind()) + " model loaded from " + path;
  models_.push_back({std::move(id), std::move(description), std::move(equation), std::move(model), false});
  return models_.back();
}

const RegisteredModel* ModelRegistry::find(std::string_view id) const {
  for (const auto& m : models_) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

nlohmann::ordered_json ModelRegistry::list_json() const {
  auto out = nlohmann::ordered_json::array();
  for (const auto& m : models_) {
    nlohmann::ordered_json item;
    item["id"] = m.id;
    const auto g = m.model.granularity();
    item["granularity"] = g ? nlohmann::ordered_json(std::string(to_string(*g))) : nlohmann::ordered_json(nullptr);
    item["kind"] = std::string(m.model.kind());
    item["description"] = m.description;
    item["equation"] = m.equation;
    item["published"] = m.published;
    out.push_back(std::move(item));
  }
  return out;
}

RegisteredModel resolve_model(std::string_view id_or_path) {
  if (auto id = parse_paper_model(id_or_path)) {
    const auto& info = paper_model_info(*id);
    const auto& m = builtin_model(*id);
    return {std::string(info.name), std::string(info.description), render_equation(m), Model(m), true};
  }
  const std::string path(id_or_path);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::UnknownModel, "unknown model '" + path + "': not a published model id or a file");
  }
  auto model = load_model_file(path);
  std::string equation;
  if (const auto* linear = std::get_if<LinearModel>(&model.value())) equation = render_equation(*linear);
  return {path, "model file " + path, std::move(equation), std::move(model), false};
}

nlohmann::ordered_json PredictionOutcome::to_json(bool include_factor_values) const {
  nlohmann::ordered_json doc;
  doc["raw"] = raw;
  doc["clamped"] = clamped;
  doc["model"] = model;
  if (include_factor_values && factor_values) {
    nlohmann::ordered_json factors;
    for (const auto& name : factor_names()) factors[name] = factor_values->at(name);
    doc["factor_values"] = std::move(factors);
  }
  return doc;
}

PredictionOutcome predict_with(const RegisteredModel& entry, const FeatureMap& inputs,
                               const QuestionnaireSchema& schema, const GradeBounds& bounds) {
  PredictionOutcome out;
  out.model = entry.id;
  if (entry.model.granularity() == Granularity::Factor && looks_like_variables(inputs)) {
    out.factor_values = aggregate_factors(inputs, schema);
    out.raw = entry.model.predict(*out.factor_values);
  } else {
    out.raw = entry.model.predict(inputs);
  }
  out.clamped = bounds.clamp(out.raw);
  return out;
}

}  // namespace gradecast
