#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gradecast {

inline constexpr int kVariableCount = 70;
inline constexpr int kFactorCount = 21;

// Questionnaire item x1..x70.
class VariableId {
 public:
  constexpr VariableId() = default;
  // Throws Error(InvalidArgument) when index is outside 1..70.
  explicit VariableId(int index);

  constexpr int index() const noexcept { return index_; }
  std::string str() const;

  // Accepts "x1".."x70"; anything else yields nullopt.
  static std::optional<VariableId> parse(std::string_view text);

  friend constexpr auto operator<=>(VariableId, VariableId) = default;

 private:
  int index_ = 1;
};

enum class FactorCode : std::uint8_t {
  SSH, SF, SATD, SAT, ST, LAT, LTS, LCS, LA, LD, OH,
  OE, OB, UF, UCP, ULT, UTA, FI, FS, FPE, FPG,
};

struct FactorInfo {
  FactorCode code;
  std::string_view upper;  // "SSH"
  std::string_view lower;  // "ssh", the dataset feature name
  std::string_view title;
  int first;  // first member variable index
  int last;   // last member variable index (inclusive)
};

const std::array<FactorInfo, kFactorCount>& factor_table();
const FactorInfo& factor_info(FactorCode code);
std::array<FactorCode, kFactorCount> all_factors();
std::string_view to_string(FactorCode code);
// Case-insensitive: "SAT" and "sat" both parse.
std::optional<FactorCode> parse_factor(std::string_view text);

struct ResponseScale {
  int min = 1;
  int max = 5;

  bool contains(double value) const { return value >= min && value <= max; }
  friend bool operator==(const ResponseScale&, const ResponseScale&) = default;
};

struct GradeBounds {
  double min = 0.0;
  double max = 7.0;

  double clamp(double value) const;
  bool contains(double value) const { return value >= min && value <= max; }
};

struct SchemaVariable {
  VariableId id;
  std::string prompt;
  FactorCode factor;

  friend bool operator==(const SchemaVariable&, const SchemaVariable&) = default;
};

class QuestionnaireSchema {
 public:
  // Validates the 70-entry layout and factor ranges; throws Error(InvalidArgument).
  QuestionnaireSchema(std::vector<SchemaVariable> variables, ResponseScale scale);

  const std::vector<SchemaVariable>& variables() const noexcept { return variables_; }
  const ResponseScale& scale() const noexcept { return scale_; }
  const SchemaVariable& variable(VariableId id) const { return variables_[id.index() - 1]; }
  FactorCode factor_of(VariableId id) const { return variable(id).factor; }
  const std::string& prompt(VariableId id) const { return variable(id).prompt; }

  nlohmann::ordered_json to_json() const;
  static QuestionnaireSchema from_json(const nlohmann::ordered_json& doc);

  friend bool operator==(const QuestionnaireSchema&, const QuestionnaireSchema&) = default;

 private:
  std::vector<SchemaVariable> variables_;
  ResponseScale scale_;
};

// The canonical 70-item questionnaire with its 21-factor grouping.
const QuestionnaireSchema& builtin_schema();

// Contiguous member variables of a factor, ascending.
std::vector<VariableId> factor_members(const QuestionnaireSchema& schema, FactorCode code);

// Names of all 70 variables ("x1".."x70") and all 21 factors ("ssh".."fpg").
std::vector<std::string> variable_names();
std::vector<std::string> factor_names();

// Reads a schema JSON file; throws Error(ParseError) on malformed content.
QuestionnaireSchema load_schema_file(const std::string& path);

// The schema named by GRADECAST_SCHEMA, or the builtin one when unset.
QuestionnaireSchema active_schema();

}  // namespace gradecast
