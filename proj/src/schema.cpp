#include "gradecast/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "gradecast/error.hpp"

namespace gradecast {

namespace {

constexpr std::array<FactorInfo, kFactorCount> kFactors{{
    {FactorCode::SSH, "SSH", "ssh", "Student Study Habit", 1, 3},
    {FactorCode::SF, "SF", "sf", "Student Fear and Perception", 4, 6},
    {FactorCode::SATD, "SATD", "satd", "Student Attendance", 7, 9},
    {FactorCode::SAT, "SAT", "sat", "Student Attitude", 10, 13},
    {FactorCode::ST, "ST", "st", "Tutorials and Extra Classes", 14, 16},
    {FactorCode::LAT, "LAT", "lat", "Lecturer Attitude", 17, 20},
    {FactorCode::LTS, "LTS", "lts", "Teaching Style", 21, 24},
    {FactorCode::LCS, "LCS", "lcs", "Communication Skills", 25, 28},
    {FactorCode::LA, "LA", "la", "Lecturer Availability", 29, 31},
    {FactorCode::LD, "LD", "ld", "Lecturer Dedication", 32, 35},
    {FactorCode::OH, "OH", "oh", "Health", 36, 38},
    {FactorCode::OE, "OE", "oe", "Electricity", 39, 41},
    {FactorCode::OB, "OB", "ob", "Background Knowledge", 42, 45},
    {FactorCode::UF, "UF", "uf", "Facilities", 46, 49},
    {FactorCode::UCP, "UCP", "ucp", "Class Population", 50, 52},
    {FactorCode::ULT, "ULT", "ult", "Lecture Time", 53, 55},
    {FactorCode::UTA, "UTA", "uta", "Teaching Aids", 56, 58},
    {FactorCode::FI, "FI", "fi", "Family Income", 59, 61},
    {FactorCode::FS, "FS", "fs", "Family Stress", 62, 64},
    {FactorCode::FPE, "FPE", "fpe", "Parent Education", 65, 67},
    {FactorCode::FPG, "FPG", "fpg", "Proper Guidance", 68, 70},
}};

constexpr std::array<std::string_view, kVariableCount> kPrompts{
    "I had enough time to study programming",
    "Studying before attending a class aided my assimilation during programming classes.",
    "Studying programming was never a wasted effort",
    "Programming sounded very scary",
    "I was always nervous during programming classes",
    "I was always nervous during programming examinations",
    "I attended programming classes regularly",
    "Blending in after missing a class was very easy",
    "I was very serious with programming classes",
    "I believed I could understand the programming course",
    "I had interest in programming beyond class level",
    "Programming was not confusing and did not cause headache",
    "Programming is relevant to my pursuit",
    "Group discussions helped me to understand programming",
    "Attending programming tutorials was very helpful",
    "Programming courses tutorials helped me so much",
    "Motivation of programming lecturers encouraged my commitment towards learning programming",
    "Programming language lecturers helped me develop interest in programming",
    "Programming languages lecturers were never partial in their dealings with students",
    "Programming lecturers were friendly during lectures",
    "Programming language lecturers enforced discipline during their lectures",
    "Programming languages lecturers were too serious during lectures",
    "Teaching methods and styles of programming lecturers inhibited lecture clarity",
    "Programming language lecturers wasted time on matters with less relevance in class",
    "Programming language lecturers were always clear, precise and communicates understandably",
    "Programming language lecturers made use of enough relevant instructional materials",
    "Programming language lecturers delivered course contents well and to my understanding",
    "Programming language lecturers were very clear and explicit",
    "Programming language lecturers didn't miss classes",
    "Programming language lecturers attended to me whenever I had difficulties with their course(s)",
    "Programming lecturers were always available",
    "Programming course lecturers allowed students to ask questions and take time to explain",
    "Programming course lecturers came to class fully prepared",
    "Programming languages lecturers spent extra time to explain things during class",
    "Programming language lecturers usually came early to class",
    "I fell sick quite often",
    "Prolong usage of computer caused me headache",
    "I took a few compulsory medications frequently",
    "It was difficult to charge my computer even within the campus",
    "Erratic power supply reduced the effectiveness of my practice",
    "Consistent power supply helped me in programming courses",
    "I had a good background in physics",
    "I had a good background in mathematics",
    "I had a good background in English",
    "Strong background in Physics and Mathematics helped me in programming",
    "Absence of accessible ICT facilities inhibited my programming performance",
    "The environment where we had programming lectures was not conducive",
    "Lack of computer programming facilities disrupted clear understanding of programming lessons",
    "The school library was not equipped with materials relevant to programming",
    "Large class population disrupted my concentration during programming lectures",
    "Population of students offering programming courses debarred my commitment to learning",
    "Effectiveness of the programming lecturers' teaching was reduced by huge programming class population.",
    "Programming lectures were scheduled after an equally tiring lecture",
    "Programming courses were scheduled to non-conductive times",
    "We had programming classes at unfavorable times",
    "Programming lecture theatres were equipped with audio-visuals and learning aids",
    "Programming courses were analyzed clearly to sight",
    "I had a visual understanding of what the programming lecturer was implying",
    "Expensive cost of living did not affect my performance in programming classes",
    "My family could afford to buy enough programming textbooks",
    "My family sponsored my academic pursuit",
    "Quarrel between family members is normal",
    "I had to travel to settle quarrels within my family",
    "Quarrel between my family members escalates a times",
    "My father is familiar with computers",
    "My mother is familiar with computers",
    "My parents are well educated",
    "My parent would want me to offer programming courses",
    "I received educational advices from family members often",
    "My family believed that a proper study will help me in programming courses",
};

FactorCode factor_for_index(int index) {
  for (const auto& f : kFactors) {
    if (index >= f.first && index <= f.last) return f.code;
  }
  throw Error(ErrorKind::InvalidArgument, "variable index out of range: " + std::to_string(index));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

VariableId::VariableId(int index) : index_(index) {
  if (index < 1 || index > kVariableCount) {
    throw Error(ErrorKind::InvalidArgument, "variable index out of range: " + std::to_string(index));
  }
}

std::string VariableId::str() const { return "x" + std::to_string(index_); }

std::optional<VariableId> VariableId::parse(std::string_view text) {
  if (text.size() < 2 || text.front() != 'x') return std::nullopt;
  auto digits = text.substr(1);
  // reject leading zeros and signs so that parse/str round-trips
  if (digits.front() == '0' || !std::isdigit(static_cast<unsigned char>(digits.front()))) {
    return std::nullopt;
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  if (value < 1 || value > kVariableCount) return std::nullopt;
  return VariableId(value);
}

const std::array<FactorInfo, kFactorCount>& factor_table() { return kFactors; }

const FactorInfo& factor_info(FactorCode code) { return kFactors[static_cast<std::size_t>(code)]; }

std::array<FactorCode, kFactorCount> all_factors() {
  std::array<FactorCode, kFactorCount> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = kFactors[i].code;
  return out;
}

std::string_view to_string(FactorCode code) { return factor_info(code).upper; }

std::optional<FactorCode> parse_factor(std::string_view text) {
  const auto key = lower(text);
  for (const auto& f : kFactors) {
    if (key == f.lower) return f.code;
  }
  return std::nullopt;
}

double GradeBounds::clamp(double value) const { return std::clamp(value, min, max); }

QuestionnaireSchema::QuestionnaireSchema(std::vector<SchemaVariable> variables, ResponseScale scale)
    : variables_(std::move(variables)), scale_(scale) {
  if (scale_.min >= scale_.max) {
    throw Error(ErrorKind::InvalidArgument, "response scale requires min < max");
  }
  if (variables_.size() != kVariableCount) {
    throw Error(ErrorKind::InvalidArgument,
                "schema must list exactly 70 variables, got " + std::to_string(variables_.size()));
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    const int expected = static_cast<int>(i) + 1;
    if (v.id.index() != expected) {
      throw Error(ErrorKind::InvalidArgument,
                  "schema variables must be ordered x1..x70; position " + std::to_string(expected) +
                      " holds " + v.id.str());
    }
    if (v.factor != factor_for_index(expected)) {
      throw Error(ErrorKind::InvalidArgument,
                  v.id.str() + " assigned to " + std::string(to_string(v.factor)) + ", expected " +
                      std::string(to_string(factor_for_index(expected))));
    }
  }
}

nlohmann::ordered_json QuestionnaireSchema::to_json() const {
  nlohmann::ordered_json doc;
  doc["scale"] = {{"min", scale_.min}, {"max", scale_.max}};
  auto vars = nlohmann::ordered_json::array();
  for (const auto& v : variables_) {
    nlohmann::ordered_json item;
    item["id"] = v.id.str();
    item["prompt"] = v.prompt;
    item["factor"] = std::string(to_string(v.factor));
    vars.push_back(std::move(item));
  }
  doc["variables"] = std::move(vars);
  return doc;
}

QuestionnaireSchema QuestionnaireSchema::from_json(const nlohmann::ordered_json& doc) {
  try {
    ResponseScale scale;
    if (doc.contains("scale")) {
      scale.min = doc.at("scale").at("min").get<int>();
      scale.max = doc.at("scale").at("max").get<int>();
    }
    std::vector<SchemaVariable> vars;
    for (const auto& item : doc.at("variables")) {
      const auto id_text = item.at("id").get<std::string>();
      auto id = VariableId::parse(id_text);
      if (!id) throw Error(ErrorKind::ParseError, "invalid variable id in schema: " + id_text);
      const auto factor_text = item.at("factor").get<std::string>();
      auto factor = parse_factor(factor_text);
      if (!factor) throw Error(ErrorKind::ParseError, "invalid factor code in schema: " + factor_text);
      vars.push_back({*id, item.at("prompt").get<std::string>(), *factor});
    }
    return QuestionnaireSchema(std::move(vars), scale);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed schema document: ") + e.what());
  }
}

const QuestionnaireSchema& builtin_schema() {
  static const QuestionnaireSchema schema = [] {
    std::vector<SchemaVariable> vars;
    vars.reserve(kVariableCount);
    for (int i = 1; i <= kVariableCount; ++i) {
      vars.push_back({VariableId(i), std::string(kPrompts[i - 1]), factor_for_index(i)});
    }
    return QuestionnaireSchema(std::move(vars), ResponseScale{});
  }();
  return schema;
}

std::vector<VariableId> factor_members(const QuestionnaireSchema& schema, FactorCode code) {
  std::vector<VariableId> out;
  for (const auto& v : schema.variables()) {
    if (v.factor == code) out.push_back(v.id);
  }
  return out;
}

std::vector<std::string> variable_names() {
  std::vector<std::string> out;
  out.reserve(kVariableCount);
  for (int i = 1; i <= kVariableCount; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

std::vector<std::string> factor_names() {
  std::vector<std::string> out;
  out.reserve(kFactorCount);
  for (const auto& f : kFactors) out.emplace_back(f.lower);
  return out;
}

QuestionnaireSchema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open schema file: " + path);
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "schema file " + path + " is not valid JSON: " + e.what());
  }
  return QuestionnaireSchema::from_json(doc);
}

QuestionnaireSchema active_schema() {
  if (const char* path = std::getenv("GRADECAST_SCHEMA"); path != nullptr && *path != '\0') {
    return load_schema_file(path);
  }
  return builtin_schema();
}

}  // namespace gradecast
