#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <thread>

#include "gradecast/service.hpp"

// after Eigen (pulled in above): <resolv.h> defines a _res macro
#include <httplib.h>

namespace fs = std::filesystem;
using namespace gradecast;

namespace {

QuestionnaireSchema zero_coded_schema() {
  auto doc = builtin_schema().to_json();
  doc["scale"]["min"] = 0;
  doc["scale"]["max"] = 4;
  return QuestionnaireSchema::from_json(doc);
}

// Runs a Service on an ephemeral loopback port for the lifetime of the object.
struct LiveServer {
  httplib::Server server;
  Service service;
  std::thread thread;
  int port = 0;

  explicit LiveServer(Service s) : service(std::move(s)) {
    service.mount(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

nlohmann::ordered_json responses(const std::vector<std::string>& names, int value) {
  nlohmann::ordered_json doc;
  for (const auto& n : names) doc[n] = value;
  return doc;
}

std::string predict_body(const std::string& model, const nlohmann::ordered_json& r) {
  nlohmann::ordered_json doc;
  doc["model"] = model;
  doc["responses"] = r;
  return doc.dump();
}

}  // namespace

TEST_CASE("schema endpoint") {
  LiveServer live(Service(builtin_schema(), ModelRegistry::published()));
  auto c = live.client();
  const auto a = c.Get("/api/schema");
  const auto b = c.Get("/api/schema");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->status == 200);
  CHECK(a->body == b->body);
  const auto doc = nlohmann::json::parse(a->body);
  CHECK(doc["variables"].size() == 70);
  std::set<std::string> factors;
  for (const auto& v : doc["variables"]) factors.insert(v["factor"].get<std::string>());
  CHECK(factors.size() == 21);
  CHECK(doc["scale"].contains("min"));
  CHECK(doc["scale"].contains("max"));
  CHECK(a->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("models endpoint lists the four final models with their equations") {
  const auto dir = fs::temp_directory_path() / "gradecast_service_models";
  fs::create_directories(dir);
  std::ofstream(dir / "mine.json") << R"({"intercept":2,"coefficients":{"ssh":0.5}})";
  auto registry = ModelRegistry::published();
  registry.add_custom((dir / "mine.json").string());
  LiveServer live(Service(builtin_schema(), std::move(registry)));
  auto c = live.client();
  const auto r = c.Get("/api/models");
  REQUIRE(r);
  const auto doc = nlohmann::json::parse(r->body);
  REQUIRE(doc.size() == 5);
  const char* ids[] = {"lrc_variable", "lrc_factor", "m5p_variable_final", "m5p_factor_final", "custom:mine"};
  for (int i = 0; i < 5; ++i) CHECK(doc[i]["id"] == ids[i]);
  CHECK(doc[0]["granularity"] == "variable");
  CHECK(doc[1]["granularity"] == "factor");
  CHECK(doc[0]["equation"].get<std::string>().ends_with("+ 9.8865"));
  CHECK(doc[4]["published"] == false);
  fs::remove_all(dir);
}

TEST_CASE("predict endpoint") {
  LiveServer live(Service(zero_coded_schema(), ModelRegistry::published()));
  auto c = live.client();

  SUBCASE("zero-coded answers return the intercept") {
    const auto r = c.Post("/api/predict", predict_body("lrc_variable", responses(variable_names(), 0)), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto doc = nlohmann::json::parse(r->body);
    CHECK(doc["raw"] == 9.8865);
    CHECK(doc["clamped"] == 7.0);
    CHECK(doc["model"] == "lrc_variable");
  }
  SUBCASE("missing answer") {
    auto rs = responses(variable_names(), 2);
    rs.erase("x41");
    const auto r = c.Post("/api/predict", predict_body("lrc_variable", rs), "application/json");
    REQUIRE(r);
    CHECK(r->status == 422);
    const auto doc = nlohmann::json::parse(r->body);
    CHECK(doc["missing"] == nlohmann::json::array({"x41"}));
  }
  SUBCASE("out of scale and non-integer answers") {
    auto rs = responses(variable_names(), 2);
    rs["x5"] = 9;
    rs["x6"] = 1.5;
    const auto r = c.Post("/api/predict", predict_body("lrc_variable", rs), "application/json");
    REQUIRE(r);
    CHECK(r->status == 422);
    const auto doc = nlohmann::json::parse(r->body);
    CHECK(doc["out_of_scale"] == nlohmann::json::array({"x5"}));
    CHECK(doc["invalid"] == nlohmann::json::array({"x6"}));
  }
  SUBCASE("factor models echo the aggregated inputs") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> answer(0, 4);
    nlohmann::ordered_json rs;
    FeatureMap values;
    for (const auto& n : variable_names()) {
      const int v = answer(rng);
      rs[n] = v;
      values[n] = v;
    }
    const auto r = c.Post("/api/predict", predict_body("lrc_factor", rs), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const auto doc = nlohmann::json::parse(r->body);
    const auto expected = aggregate_factors(values, builtin_schema());
    REQUIRE(doc["factor_values"].size() == 21);
    for (const auto& [name, v] : expected) CHECK(doc["factor_values"][name].get<double>() == v);
  }
  SUBCASE("error statuses") {
    const auto unknown = c.Post("/api/predict", predict_body("nope", responses(variable_names(), 1)), "application/json");
    REQUIRE(unknown);
    CHECK(unknown->status == 404);
    const auto malformed = c.Post("/api/predict", "{not json", "application/json");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);
    const auto no_model = c.Post("/api/predict", R"({"responses":{}})", "application/json");
    REQUIRE(no_model);
    CHECK(no_model->status == 400);
  }
}

TEST_CASE("health, CORS preflight and static mount") {
  const auto dir = fs::temp_directory_path() / "gradecast_service_ui";
  fs::create_directories(dir);
  std::ofstream(dir / "index.html") << "<!doctype html><title>ui</title>";
  ServiceConfig config;
  config.cors_origin = "http://localhost:5173";
  config.static_dir = dir.string();
  LiveServer live(Service(builtin_schema(), ModelRegistry::published(), GradeBounds{}, config));
  auto c = live.client();

  const auto h = c.Get("/api/health");
  REQUIRE(h);
  CHECK(nlohmann::json::parse(h->body)["version"] == std::string(build_version()));
  CHECK(h->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");

  const auto pre = c.Options("/api/predict");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  const auto page = c.Get("/index.html");
  REQUIRE(page);
  CHECK(page->status == 200);
  CHECK(page->body.find("<title>ui</title>") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("concurrent requests see identical responses") {
  LiveServer live(Service(builtin_schema(), ModelRegistry::published()));
  const auto body = predict_body("m5p_variable_final", responses(variable_names(), 3));
  std::vector<std::future<std::string>> jobs;
  for (int i = 0; i < 8; ++i) {
    jobs.push_back(std::async(std::launch::async, [&] {
      auto c = live.client();
      const auto r = c.Post("/api/predict", body, "application/json");
      return r ? r->body : std::string("<no response>");
    }));
  }
  const auto first = jobs[0].get();
  CHECK(nlohmann::json::parse(first).contains("raw"));
  for (std::size_t i = 1; i < jobs.size(); ++i) CHECK(jobs[i].get() == first);
}

TEST_CASE("in-process handlers match the HTTP layer") {
  const Service s(builtin_schema(), ModelRegistry::published());
  const auto reply = s.predict(predict_body("lrc_variable", responses(variable_names(), 1)));
  CHECK(reply.status == 200);
  CHECK(s.schema().body == builtin_schema().to_json().dump());
}
