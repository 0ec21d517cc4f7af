#include "gradecast/paper_models.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "gradecast/error.hpp"
#include "gradecast/format.hpp"

namespace gradecast {

namespace {

constexpr std::array<PaperModelInfo, 6> kInfo{{
    {PaperModelId::LrcVariable, "lrc_variable", Granularity::Variable,
     "Linear regression classifier trained on the 70 questionnaire variables"},
    {PaperModelId::LrcFactor, "lrc_factor", Granularity::Factor,
     "Linear regression classifier trained on the 21 factor scores"},
    {PaperModelId::M5pVariableFinal, "m5p_variable_final", Granularity::Variable,
     "M5P model tree on the questionnaire variables, final smoothed linear model"},
    {PaperModelId::M5pFactorFinal, "m5p_factor_final", Granularity::Factor,
     "M5P model tree on the factor scores, final smoothed linear model"},
    {PaperModelId::M5pVariableFirst, "m5p_variable_first", Granularity::Variable,
     "M5P model tree on the questionnaire variables, first smoothed linear model"},
    {PaperModelId::M5pFactorFirst, "m5p_factor_first", Granularity::Factor,
     "M5P model tree on the factor scores, first smoothed linear model"},
}};

LinearModel make_lrc_variable() {
  return LinearModel(9.8865, {
      {"x1", 0.0444},   {"x2", 0.3166},   {"x3", 0.0746},   {"x4", -0.0415},  {"x5", -0.239},
      {"x6", 0.3153},   {"x7", -0.1467},  {"x8", 0.3464},   {"x9", 0.6227},   {"x11", -0.1404},
      {"x12", -0.3228}, {"x13", 0.1179},  {"x14", -0.4613}, {"x15", -0.3948}, {"x16", 0.4249},
      {"x17", -0.2241}, {"x18", -0.1389}, {"x19", 0.2025},  {"x20", 0.0664},  {"x21", 0.133},
      {"x22", 0.1745},  {"x23", -0.3222}, {"x24", -0.3334}, {"x25", -0.2479}, {"x26", -0.1623},
      {"x28", 0.0665},  {"x29", -0.2556}, {"x30", 0.2829},  {"x31", -0.2215}, {"x33", -0.4575},
      {"x34", 0.135},   {"x35", 0.3312},  {"x36", -0.2152}, {"x37", 0.2407},  {"x38", 0.1757},
      {"x39", -0.2986}, {"x40", 0.1768},  {"x41", -0.2375}, {"x42", -0.1969}, {"x43", 0.2352},
      {"x44", -0.098},  {"x45", 0.4561},  {"x46", -0.136},  {"x47", -0.387},  {"x48", 0.1525},
      {"x49", -0.2215}, {"x50", 0.0481},  {"x51", 0.1292},  {"x52", 0.1508},  {"x53", 0.4368},
      {"x54", -0.3313}, {"x55", -0.1794}, {"x56", -0.0523}, {"x57", -0.3505}, {"x58", 0.4718},
      {"x59", 0.269},   {"x60", 0.086},   {"x61", -0.3004}, {"x62", -0.444},  {"x63", 0.3544},
      {"x64", -0.2301}, {"x65", -0.538},  {"x66", 0.0899},  {"x67", 0.2394},  {"x68", -0.0681},
      {"x69", -0.1007}, {"x70", -0.3858},
  });
}

LinearModel make_lrc_factor() {
  return LinearModel(5.6703, {
      {"sf", -0.074}, {"satd", 0.0942}, {"sat", 0.065},   {"lat", 0.0449}, {"lcs", -0.0448},
      {"la", -0.0407}, {"oh", 0.0493},  {"oe", 0.0814},   {"uf", -0.0792}, {"fi", 0.0621},
      {"fs", -0.0663}, {"fpe", -0.0533}, {"fpg", -0.1233},
  });
}

LinearModel make_m5p_variable_first() {
  return LinearModel(3.9539, {
      {"x1", 0.0297},  {"x4", 0.0187},  {"x5", -0.0376},  {"x9", 0.1263},  {"x12", -0.017},
      {"x14", -0.0826}, {"x15", 0.021}, {"x19", 0.0316},  {"x22", -0.0209}, {"x57", 0.0389},
      {"x59", 0.0211}, {"x65", -0.0343}, {"x69", -0.0217},
  });
}

LinearModel make_m5p_variable_final() {
  return LinearModel(5.9906, {
      {"x1", 0.0155},  {"x4", 0.0098},   {"x5", -0.0652},  {"x7", 0.0552},  {"x9", 0.1046},
      {"x12", -0.0089}, {"x14", -0.0143}, {"x15", 0.011},  {"x19", -0.0503}, {"x22", -0.1112},
      {"x29", 0.032},  {"x33", -0.0288}, {"x59", 0.0324},  {"x65", -0.06},   {"x69", -0.188},
  });
}

LinearModel make_m5p_factor_first() {
  return LinearModel(5.0805, {
      {"ssh", 0.0481}, {"sf", 0.1057},  {"satd", 0.0343}, {"sat", 0.0084}, {"st", -0.0083},
      {"lat", 0.0127}, {"lcs", 0.0475}, {"la", -0.1963},  {"oe", 0.0141},  {"ucp", 0.0232},
      {"fs", -0.0248}, {"fpe", -0.0097}, {"fpg", -0.0293},
  });
}

LinearModel make_m5p_factor_final() {
  return LinearModel(4.0297, {
      {"sf", -0.0144}, {"satd", 0.0307}, {"sat", 0.0106}, {"st", -0.0101}, {"lat", 0.0045},
      {"lcs", -0.0548}, {"ld", 0.0202},  {"oe", 0.0273},  {"ob", 0.0675},  {"ult", -0.0159},
      {"fs", -0.0466}, {"fpe", -0.0034}, {"fpg", -0.0321},
  });
}

}  // namespace

const PaperModelInfo& paper_model_info(PaperModelId id) { return kInfo[static_cast<std::size_t>(id)]; }

std::string_view to_string(PaperModelId id) { return paper_model_info(id).name; }

std::optional<PaperModelId> parse_paper_model(std::string_view name) {
  for (const auto& info : kInfo) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

std::array<PaperModelId, 6> all_paper_models() {
  return {PaperModelId::LrcVariable,      PaperModelId::LrcFactor,        PaperModelId::M5pVariableFinal,
          PaperModelId::M5pFactorFinal,   PaperModelId::M5pVariableFirst, PaperModelId::M5pFactorFirst};
}

std::array<PaperModelId, 4> final_paper_models() {
  return {PaperModelId::LrcVariable, PaperModelId::LrcFactor, PaperModelId::M5pVariableFinal,
          PaperModelId::M5pFactorFinal};
}

const LinearModel& builtin_model(PaperModelId id) {
  static const std::array<LinearModel, 6> models{
      make_lrc_variable(),      make_lrc_factor(),        make_m5p_variable_final(),
      make_m5p_factor_final(),  make_m5p_variable_first(), make_m5p_factor_first(),
  };
  return models[static_cast<std::size_t>(id)];
}

std::string render_equation(const LinearModel& m) {
  std::string out = "grade =";
  bool first = true;
  for (const auto& [feature, value] : m.terms()) {
    if (first) {
      out += value < 0 ? " -" : " ";
    } else {
      out += value < 0 ? " - " : " + ";
    }
    out += format_number(std::abs(value)) + "*" + feature;
    first = false;
  }
  const double c = m.intercept();
  if (first) {
    out += " " + format_number(c);
  } else {
    out += (c < 0 ? " - " : " + ") + format_number(std::abs(c));
  }
  return out;
}

PaperPrediction predict_paper(PaperModelId id, const FeatureMap& responses, const GradeBounds& bounds) {
  const double raw = predict_linear(builtin_model(id), responses);
  return {raw, bounds.clamp(raw)};
}

SignificanceReport classify_significance(const LinearModel& m, std::span<const std::string> universe) {
  if (universe.empty()) throw Error(ErrorKind::InvalidArgument, "significance needs a non-empty feature universe");
  SignificanceReport report;
  for (const auto& feature : universe) {
    const double c = m.coefficient(feature).value_or(0.0);
    if (c > 0.0) {
      report.positive.push_back(feature);
    } else if (c < 0.0) {
      report.negative.push_back(feature);
    } else {
      report.insignificant.push_back(feature);
    }
  }
  return report;
}

std::string coefficient_digest(const LinearModel& m) {
  std::vector<std::string> lines;
  lines.reserve(m.terms().size());
  for (const auto& [feature, value] : m.terms()) lines.push_back(feature + "=" + format_number(value));
  std::sort(lines.begin(), lines.end());
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  text += "intercept=" + format_number(m.intercept()) + "\n";

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidArgument, "SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace gradecast
