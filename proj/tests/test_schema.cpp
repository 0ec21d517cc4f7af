#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gradecast/error.hpp"
#include "gradecast/schema.hpp"

using namespace gradecast;

TEST_CASE("builtin schema has 70 variables grouped into 21 factors") {
  const auto& s = builtin_schema();
  CHECK(s.variables().size() == 70);
  CHECK(factor_table().size() == 21);
  CHECK(s.scale().min == 1);
  CHECK(s.scale().max == 5);

  std::size_t covered = 0;
  for (auto code : all_factors()) covered += factor_members(s, code).size();
  CHECK(covered == 70);
}

TEST_CASE("factor membership follows the questionnaire layout") {
  const auto& s = builtin_schema();
  const auto sat = factor_members(s, FactorCode::SAT);
  REQUIRE(sat.size() == 4);
  CHECK(sat.front().str() == "x10");
  CHECK(sat.back().str() == "x13");
  CHECK(s.factor_of(VariableId(1)) == FactorCode::SSH);
  CHECK(s.factor_of(VariableId(70)) == FactorCode::FPG);
  CHECK(s.factor_of(VariableId(32)) == FactorCode::LD);
}

TEST_CASE("prompts are stored verbatim") {
  const auto& s = builtin_schema();
  CHECK(s.prompt(VariableId(1)) == "I had enough time to study programming");
  CHECK(s.prompt(VariableId(10)) == "I believed I could understand the programming course");
  CHECK(s.prompt(VariableId(27)) ==
        "Programming language lecturers delivered course contents well and to my understanding");
  CHECK(s.prompt(VariableId(32)) ==
        "Programming course lecturers allowed students to ask questions and take time to explain");
}

TEST_CASE("variable ids parse strictly") {
  CHECK(VariableId::parse("x1")->index() == 1);
  CHECK(VariableId::parse("x70")->index() == 70);
  CHECK_FALSE(VariableId::parse("x0"));
  CHECK_FALSE(VariableId::parse("x71"));
  CHECK_FALSE(VariableId::parse("x09"));
  CHECK_FALSE(VariableId::parse("X9"));
  CHECK_FALSE(VariableId::parse("x"));
  CHECK_FALSE(VariableId::parse("grade"));
  CHECK_THROWS_AS(VariableId(0), Error);
}

TEST_CASE("factor codes parse case-insensitively") {
  CHECK(parse_factor("sat") == FactorCode::SAT);
  CHECK(parse_factor("SAT") == FactorCode::SAT);
  CHECK(parse_factor("Fpg") == FactorCode::FPG);
  CHECK_FALSE(parse_factor("xyz"));
  CHECK(to_string(FactorCode::LCS) == "LCS");
}

TEST_CASE("name lists are canonical") {
  const auto v = variable_names();
  const auto f = factor_names();
  REQUIRE(v.size() == 70);
  REQUIRE(f.size() == 21);
  CHECK(v[0] == "x1");
  CHECK(v[69] == "x70");
  CHECK(f[0] == "ssh");
  CHECK(f[20] == "fpg");
}

TEST_CASE("schema JSON round-trips and keeps a stable layout") {
  const auto& s = builtin_schema();
  const auto doc = s.to_json();
  CHECK(doc["scale"]["min"] == 1);
  CHECK(doc["scale"]["max"] == 5);
  CHECK(doc["variables"].size() == 70);
  CHECK(doc["variables"][0]["id"] == "x1");
  CHECK(doc["variables"][0]["factor"] == "SSH");
  CHECK(QuestionnaireSchema::from_json(doc) == s);
  CHECK(doc.dump() == builtin_schema().to_json().dump());
}

TEST_CASE("schema validation rejects broken layouts") {
  auto vars = builtin_schema().variables();
  SUBCASE("too few variables") {
    vars.pop_back();
    CHECK_THROWS_AS(QuestionnaireSchema(vars, ResponseScale{}), Error);
  }
  SUBCASE("variable in the wrong factor") {
    vars[0].factor = FactorCode::FPG;
    CHECK_THROWS_AS(QuestionnaireSchema(vars, ResponseScale{}), Error);
  }
  SUBCASE("empty scale") {
    CHECK_THROWS_AS(QuestionnaireSchema(vars, ResponseScale{3, 3}), Error);
  }
}

TEST_CASE("schema files and the environment override") {
  const auto dir = std::filesystem::temp_directory_path() / "gradecast_schema_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "zero.json").string();
  auto doc = builtin_schema().to_json();
  doc["scale"]["min"] = 0;
  doc["scale"]["max"] = 4;
  std::ofstream(path) << doc.dump();

  const auto loaded = load_schema_file(path);
  CHECK(loaded.scale().min == 0);
  CHECK(loaded.scale().max == 4);

  ::setenv("GRADECAST_SCHEMA", path.c_str(), 1);
  CHECK(active_schema().scale().min == 0);
  ::unsetenv("GRADECAST_SCHEMA");
  CHECK(active_schema().scale().min == 1);

  std::ofstream(dir / "bad.json") << "{not json";
  try {
    load_schema_file((dir / "bad.json").string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("grade bounds clamp for display") {
  GradeBounds b;
  CHECK(b.clamp(9.8865) == 7.0);
  CHECK(b.clamp(-1.0) == 0.0);
  CHECK(b.clamp(4.25) == 4.25);
}
