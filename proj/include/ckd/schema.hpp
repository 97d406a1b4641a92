#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckd/error.hpp"

namespace ckd {

struct DiscreteInteger {
  friend bool operator==(const DiscreteInteger&, const DiscreteInteger&) = default;
};
struct Numeric {
  friend bool operator==(const Numeric&, const Numeric&) = default;
};
struct Nominal {
  std::vector<std::string> values;  // allowed tokens, in declaration order
  friend bool operator==(const Nominal&, const Nominal&) = default;
};

using AttributeKind = std::variant<DiscreteInteger, Numeric, Nominal>;

inline bool is_nominal(const AttributeKind& k) { return std::holds_alternative<Nominal>(k); }

inline std::string kind_name(const AttributeKind& k) {
  if (std::holds_alternative<DiscreteInteger>(k)) return "discrete_integer";
  if (std::holds_alternative<Numeric>(k)) return "numeric";
  return "nominal";
}

struct Attribute {
  std::string name;         // short code as it appears in the data file
  std::string description;  // human-readable parameter name
  AttributeKind kind;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Schema {
  std::string version;
  std::vector<Attribute> attributes;  // predictors, in file order
  std::string class_attribute;
  std::string positive_label;
  std::string negative_label;

  std::size_t size() const noexcept { return attributes.size(); }

  /// Throws BadSpec when the structural invariants do not hold.
  void validate() const {
    std::set<std::string> names;
    for (const auto& a : attributes) {
      if (a.name.empty()) throw Error(Errc::BadSpec, "attribute with empty name");
      if (!names.insert(a.name).second) throw Error(Errc::BadSpec, "duplicate attribute '" + a.name + "'");
      if (const auto* nom = std::get_if<Nominal>(&a.kind)) {
        if (nom->values.empty()) throw Error(Errc::BadSpec, "nominal attribute '" + a.name + "' has no values");
        std::set<std::string> seen(nom->values.begin(), nom->values.end());
        if (seen.size() != nom->values.size())
          throw Error(Errc::BadSpec, "nominal attribute '" + a.name + "' has duplicate values");
      }
    }
    if (names.count(class_attribute)) throw Error(Errc::BadSpec, "class attribute is also a predictor");
    if (positive_label.empty() || negative_label.empty() || positive_label == negative_label)
      throw Error(Errc::BadSpec, "positive and negative labels must be distinct and non-empty");
  }

  friend bool operator==(const Schema&, const Schema&) = default;
};

/// The 24-attribute chronic kidney disease schema. Attribute order is the file
/// order; columns are joined by position.
inline Schema ckd_schema() {
  const Nominal yes_no{{"yes", "no"}};
  const Nominal normal_abnormal{{"normal", "abnormal"}};
  const Nominal present{{"present", "notpresent"}};
  const Nominal zero_to_five{{"0", "1", "2", "3", "4", "5"}};
  Schema s;
  s.version = "ckd-schema/1";
  s.attributes = {
      {"age", "Age", DiscreteInteger{}},
      {"bp", "Blood pressure", DiscreteInteger{}},
      {"sg", "Specific gravity", Nominal{{"1.005", "1.010", "1.015", "1.020", "1.025"}}},
      {"al", "Albumin", zero_to_five},
      {"su", "Sugar", zero_to_five},
      {"rbc", "Red blood cells", normal_abnormal},
      {"pc", "Pus cell", normal_abnormal},
      {"pcc", "Pus cell clumps", present},
      {"ba", "Bacteria", present},
      {"bgr", "Blood glucose random", DiscreteInteger{}},
      {"bu", "Blood urea", DiscreteInteger{}},
      {"sc", "Serum creatinine", Numeric{}},
      {"sod", "Sodium", DiscreteInteger{}},
      {"pot", "Potassium", Numeric{}},
      {"hemo", "Hemoglobin", Numeric{}},
      {"pcv", "Packed cell volume", DiscreteInteger{}},
      {"wbcc", "WBC count", DiscreteInteger{}},
      {"rbcc", "RBC count", Numeric{}},
      {"htn", "Hypertension", yes_no},
      {"dm", "Diabetes mellitus", yes_no},
      {"cad", "Coronary artery disease", yes_no},
      {"appet", "Appetite", Nominal{{"good", "poor"}}},
      {"pe", "Pedal edema", yes_no},
      {"ane", "Anemia", yes_no},
  };
  s.class_attribute = "class";
  s.positive_label = "ckd";
  s.negative_label = "notckd";
  return s;
}

inline nlohmann::json schema_to_json(const Schema& s) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : s.attributes) {
    nlohmann::json j{{"name", a.name}, {"description", a.description}, {"kind", kind_name(a.kind)}};
    if (const auto* nom = std::get_if<Nominal>(&a.kind)) j["values"] = nom->values;
    attrs.push_back(std::move(j));
  }
  return {{"version", s.version},
          {"attributes", std::move(attrs)},
          {"class_attribute", s.class_attribute},
          {"positive_label", s.positive_label},
          {"negative_label", s.negative_label}};
}

inline Schema schema_from_json(const nlohmann::json& j) {
  Schema s;
  s.version = j.at("version").get<std::string>();
  for (const auto& a : j.at("attributes")) {
    const auto kind = a.at("kind").get<std::string>();
    AttributeKind k;
    if (kind == "discrete_integer") k = DiscreteInteger{};
    else if (kind == "numeric") k = Numeric{};
    else if (kind == "nominal") k = Nominal{a.at("values").get<std::vector<std::string>>()};
    else throw Error(Errc::BadSpec, "unknown attribute kind '" + kind + "'");
    s.attributes.push_back({a.at("name").get<std::string>(), a.value("description", ""), std::move(k)});
  }
  s.class_attribute = j.at("class_attribute").get<std::string>();
  s.positive_label = j.at("positive_label").get<std::string>();
  s.negative_label = j.at("negative_label").get<std::string>();
  s.validate();
  return s;
}

}  // namespace ckd
