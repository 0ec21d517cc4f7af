#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gradecast/dataset.hpp"
#include "gradecast/model.hpp"
#include "gradecast/schema.hpp"

namespace httplib {
class Server;
}

namespace gradecast {

std::string_view build_version();

struct HttpReply {
  int status = 200;
  std::string body;  // JSON text
};

// Outcome of checking a raw "responses" object against the schema.
struct ResponseValidation {
  FeatureMap values;
  std::vector<std::string> missing;
  std::vector<std::string> out_of_scale;
  std::vector<std::string> invalid;  // unknown ids or non-integer values

  bool ok() const { return missing.empty() && out_of_scale.empty() && invalid.empty(); }
};

// Every x1..x70 must be present as an integer inside the schema scale.
ResponseValidation validate_responses(const nlohmann::ordered_json& responses, const QuestionnaireSchema& schema);

struct ServiceConfig {
  std::string cors_origin = "*";
  std::optional<std::string> static_dir;  // single-page UI bundle
};

// Request handling is pure over immutable state, so one instance serves all
// connections concurrently.
class Service {
 public:
  Service(QuestionnaireSchema schema, ModelRegistry registry, GradeBounds bounds = {}, ServiceConfig config = {});

  HttpReply schema() const;
  HttpReply models() const;
  HttpReply predict(std::string_view body) const;
  HttpReply health() const;

  // Registers /api/* routes, CORS headers and the optional static mount.
  void mount(httplib::Server& server) const;

  const QuestionnaireSchema& active_schema() const noexcept { return schema_; }
  const ModelRegistry& registry() const noexcept { return registry_; }

 private:
  QuestionnaireSchema schema_;
  ModelRegistry registry_;
  GradeBounds bounds_;
  ServiceConfig config_;
  std::string schema_body_;
  std::string models_body_;
};

}  // namespace gradecast
