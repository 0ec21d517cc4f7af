#include "gradecast/service.hpp"

#include <cmath>

#include <httplib.h>

#include "gradecast/error.hpp"

#ifndef GRADECAST_VERSION
#define GRADECAST_VERSION "0.0.0"
#endif

namespace gradecast {

namespace {

HttpReply error_reply(int status, std::string_view kind, const std::string& message) {
  nlohmann::ordered_json doc;
  doc["error"] = std::string(kind);
  doc["message"] = message;
  return {status, doc.dump()};
}

}  // namespace

std::string_view build_version() { return GRADECAST_VERSION; }

ResponseValidation validate_responses(const nlohmann::ordered_json& responses, const QuestionnaireSchema& schema) {
  ResponseValidation v;
  if (!responses.is_object()) {
    v.invalid.emplace_back("responses");
    return v;
  }
  for (const auto& [key, value] : responses.items()) {
    if (!VariableId::parse(key)) v.invalid.push_back(key);
  }
  for (const auto& name : variable_names()) {
    auto it = responses.find(name);
    if (it == responses.end()) {
      v.missing.push_back(name);
      continue;
    }
    if (!it->is_number()) {
      v.invalid.push_back(name);
      continue;
    }
    const double value = it->get<double>();
    if (!std::isfinite(value) || value != std::floor(value)) {
      v.invalid.push_back(name);
      continue;
    }
    if (!schema.scale().contains(value)) {
      v.out_of_scale.push_back(name);
      continue;
    }
    v.values.emplace(name, value);
  }
  return v;
}

Service::Service(QuestionnaireSchema schema, ModelRegistry registry, GradeBounds bounds, ServiceConfig config)
    : schema_(std::move(schema)), registry_(std::move(registry)), bounds_(bounds), config_(std::move(config)) {
  schema_body_ = schema_.to_json().dump();
  models_body_ = registry_.list_json().dump();
}

HttpReply Service::schema() const { return {200, schema_body_}; }

HttpReply Service::models() const { return {200, models_body_}; }

HttpReply Service::health() const {
  nlohmann::ordered_json doc;
  doc["status"] = "ok";
  doc["version"] = std::string(build_version());
  return {200, doc.dump()};
}

HttpReply Service::predict(std::string_view body) const {
  nlohmann::ordered_json request;
  try {
    request = nlohmann::ordered_json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, "malformed_json", e.what());
  }
  if (!request.is_object() || !request.contains("model") || !request["model"].is_string()) {
    return error_reply(400, "malformed_request", "request must be an object with a string \"model\" field");
  }
  const auto id = request["model"].get<std::string>();
  const auto* entry = registry_.find(id);
  if (entry == nullptr) return error_reply(404, "unknown_model", "unknown model: " + id);

  const auto validation = validate_responses(request.value("responses", nlohmann::ordered_json()), schema_);
  if (!validation.ok()) {
    nlohmann::ordered_json doc;
    doc["error"] = "validation";
    doc["missing"] = validation.missing;
    doc["out_of_scale"] = validation.out_of_scale;
    doc["invalid"] = validation.invalid;
    return {422, doc.dump()};
  }
  try {
    const auto outcome = predict_with(*entry, validation.values, schema_, bounds_);
    return {200, outcome.to_json().dump()};
  } catch (const Error& e) {
    // a custom model may read features the questionnaire does not provide
    const int status = is_input_error(e.kind()) ? 422 : 500;
    return error_reply(status, to_string(e.kind()), e.what());
  }
}

void Service::mount(httplib::Server& server) const {
  const auto origin = config_.cors_origin;
  const auto send = [origin](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_content(reply.body, "application/json");
  };
  server.Get("/api/schema", [this, send](const httplib::Request&, httplib::Response& res) { send(res, schema()); });
  server.Get("/api/models", [this, send](const httplib::Request&, httplib::Response& res) { send(res, models()); });
  server.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  server.Post("/api/predict",
              [this, send](const httplib::Request& req, httplib::Response& res) { send(res, predict(req.body)); });
  server.Options(R"(/api/.*)", [origin](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  if (config_.static_dir) server.set_mount_point("/", *config_.static_dir);
}

}  // namespace gradecast
