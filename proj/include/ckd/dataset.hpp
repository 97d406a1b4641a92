#pragma once

// Typed, schema-validated dataset built from a RawTable, plus the summary
// statistics shown by `inspect` and serialization back to ARFF/CSV.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckd/error.hpp"
#include "ckd/raw_table.hpp"
#include "ckd/schema.hpp"
#include "ckd/text.hpp"

namespace ckd {

struct Missing {
  friend bool operator==(const Missing&, const Missing&) = default;
};

/// Missing, Integer, Real or Token.
using CellValue = std::variant<Missing, std::int64_t, double, std::string>;

inline bool is_missing(const CellValue& v) { return std::holds_alternative<Missing>(v); }

inline bool is_number(const CellValue& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

inline double as_real(const CellValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw Error(Errc::TypeMismatch, "cell is not numeric");
}

inline std::string cell_text(const CellValue& v) {
  if (is_missing(v)) return "?";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) return text::format_real(*d);
  return std::get<std::string>(v);
}

struct Row {
  std::vector<CellValue> cells;
  std::string label;
  friend bool operator==(const Row&, const Row&) = default;
};

struct Dataset {
  Schema schema;
  std::vector<Row> rows;

  std::size_t size() const noexcept { return rows.size(); }
  bool is_positive(std::size_t i) const { return rows[i].label == schema.positive_label; }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// What to do with a fractional value in a DiscreteInteger column.
enum class DiscreteFractions { KeepReal, Reject };

struct SchemaOptions {
  DiscreteFractions discrete_fractions = DiscreteFractions::KeepReal;
};

namespace detail {

inline std::string where(const RawRow& row, const Attribute& attr) {
  return "line " + std::to_string(row.line) + ", attribute '" + attr.name + "'";
}

inline CellValue convert_cell(const std::optional<std::string>& raw, const Attribute& attr, const RawRow& row,
                              const SchemaOptions& opts) {
  if (!raw) return Missing{};
  const std::string_view tok = text::trim(*raw);
  if (const auto* nom = std::get_if<Nominal>(&attr.kind)) {
    for (const auto& allowed : nom->values)
      if (text::iequals(tok, allowed)) return allowed;
    throw Error(Errc::DomainViolation, where(row, attr) + ": '" + std::string(tok) + "' not in allowed values");
  }
  const auto v = text::parse_double(tok);
  if (!v) throw Error(Errc::TypeMismatch, where(row, attr) + ": '" + std::string(tok) + "' is not a number");
  if (std::holds_alternative<Numeric>(attr.kind)) return *v;
  const double whole = std::round(*v);
  if (whole == *v && std::abs(whole) < 9.0e15) return static_cast<std::int64_t>(whole);
  if (opts.discrete_fractions == DiscreteFractions::Reject)
    throw Error(Errc::TypeMismatch, where(row, attr) + ": '" + std::string(tok) + "' is not an integer");
  return *v;
}

}  // namespace detail

/// Types every raw cell by the schema. Columns are joined by position: the
/// first schema.size() columns are the predictors, the last is the class.
inline Dataset apply_schema(const RawTable& raw, const Schema& schema, const SchemaOptions& opts = {}) {
  schema.validate();
  const std::size_t want = schema.size() + 1;
  if (raw.attributes.size() != want)
    throw Error(Errc::MalformedHeader, "expected " + std::to_string(want) + " columns, table has " +
                                           std::to_string(raw.attributes.size()));
  Dataset ds{schema, {}};
  ds.rows.reserve(raw.rows.size());
  for (const auto& r : raw.rows) {
    if (r.cells.size() != want)
      throw Error(Errc::MalformedHeader, "line " + std::to_string(r.line) + ": wrong field count");
    Row row;
    row.cells.reserve(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j)
      row.cells.push_back(detail::convert_cell(r.cells[j], schema.attributes[j], r, opts));
    const auto& label = r.cells.back();
    if (!label) throw Error(Errc::LabelMissing, "line " + std::to_string(r.line) + ": class label is missing");
    const auto tok = text::trim(*label);
    if (text::iequals(tok, schema.positive_label)) row.label = schema.positive_label;
    else if (text::iequals(tok, schema.negative_label)) row.label = schema.negative_label;
    else
      throw Error(Errc::DomainViolation,
                  "line " + std::to_string(r.line) + ": class label '" + std::string(tok) + "' is not a known class");
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

enum class DataFormat { Arff, Csv };

inline DataFormat parse_data_format(std::string_view s) {
  if (text::iequals(s, "arff")) return DataFormat::Arff;
  if (text::iequals(s, "csv")) return DataFormat::Csv;
  throw Error(Errc::Config, "unknown data format '" + std::string(s) + "'");
}

inline RawTable parse_table(std::string_view content, DataFormat fmt) {
  return fmt == DataFormat::Arff ? parse_arff(content) : parse_csv(content);
}

inline Dataset load_dataset(const std::string& path, DataFormat fmt, const Schema& schema = ckd_schema(),
                            const SchemaOptions& opts = {}) {
  return apply_schema(parse_table(text::read_file(path), fmt), schema, opts);
}

inline std::string write_arff(const Dataset& ds, std::string_view relation = "dataset") {
  std::string out = "@relation " + std::string(relation) + "\n\n";
  auto decl = [&](const std::string& name, const AttributeKind& k) {
    out += "@attribute '" + name + "' ";
    if (const auto* nom = std::get_if<Nominal>(&k)) {
      out += '{';
      for (std::size_t i = 0; i < nom->values.size(); ++i) out += (i ? "," : "") + nom->values[i];
      out += "}\n";
    } else {
      out += "numeric\n";
    }
  };
  for (const auto& a : ds.schema.attributes) decl(a.name, a.kind);
  decl(ds.schema.class_attribute, Nominal{{ds.schema.positive_label, ds.schema.negative_label}});
  out += "\n@data\n";
  for (const auto& r : ds.rows) {
    for (const auto& c : r.cells) out += cell_text(c) + ',';
    out += r.label + '\n';
  }
  return out;
}

inline std::string write_csv(const Dataset& ds) {
  std::string out;
  for (const auto& a : ds.schema.attributes) out += a.name + ',';
  out += ds.schema.class_attribute + '\n';
  for (const auto& r : ds.rows) {
    for (const auto& c : r.cells) out += cell_text(c) + ',';
    out += r.label + '\n';
  }
  return out;
}

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
};

struct Summary {
  std::size_t rows = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::string positive_label;
  std::string negative_label;
  std::vector<std::string> attributes;
  std::vector<std::size_t> missing;             // per attribute
  std::vector<std::optional<ValueRange>> range;  // numeric / discrete attributes with data
  std::size_t fractional_discrete = 0;          // Real cells under DiscreteInteger

  std::size_t total_missing() const {
    std::size_t s = 0;
    for (auto m : missing) s += m;
    return s;
  }
};

inline Summary summarize(const Dataset& ds) {
  Summary s;
  s.rows = ds.size();
  s.positive_label = ds.schema.positive_label;
  s.negative_label = ds.schema.negative_label;
  const std::size_t d = ds.schema.size();
  s.missing.assign(d, 0);
  s.range.assign(d, std::nullopt);
  for (const auto& a : ds.schema.attributes) s.attributes.push_back(a.name);
  for (const auto& r : ds.rows) {
    (r.label == ds.schema.positive_label ? s.positive : s.negative)++;
    for (std::size_t j = 0; j < d; ++j) {
      const auto& c = r.cells[j];
      if (is_missing(c)) {
        ++s.missing[j];
        continue;
      }
      if (!is_number(c)) continue;
      if (std::holds_alternative<double>(c) && std::holds_alternative<DiscreteInteger>(ds.schema.attributes[j].kind))
        ++s.fractional_discrete;
      const double v = as_real(c);
      auto& rg = s.range[j];
      if (!rg) rg = ValueRange{v, v};
      else {
        rg->min = std::min(rg->min, v);
        rg->max = std::max(rg->max, v);
      }
    }
  }
  return s;
}

inline nlohmann::json summary_to_json(const Summary& s) {
  nlohmann::json attrs = nlohmann::json::array();
  for (std::size_t j = 0; j < s.attributes.size(); ++j) {
    nlohmann::json a{{"name", s.attributes[j]}, {"missing", s.missing[j]}};
    if (s.range[j]) {
      a["min"] = s.range[j]->min;
      a["max"] = s.range[j]->max;
    }
    attrs.push_back(std::move(a));
  }
  return {{"rows", s.rows},
          {"predictors", s.attributes.size()},
          {"classes", {{s.positive_label, s.positive}, {s.negative_label, s.negative}}},
          {"total_missing", s.total_missing()},
          {"fractional_discrete", s.fractional_discrete},
          {"attributes", std::move(attrs)}};
}

inline std::string summary_to_text(const Summary& s) {
  std::string out;
  out += "rows        " + std::to_string(s.rows) + "\n";
  out += "predictors  " + std::to_string(s.attributes.size()) + "\n";
  out += "classes     " + s.positive_label + "=" + std::to_string(s.positive) + " " + s.negative_label + "=" +
         std::to_string(s.negative) + "\n";
  out += "missing     " + std::to_string(s.total_missing()) + "\n\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %8s %12s %12s\n", "name", "missing", "min", "max");
  out += buf;
  for (std::size_t j = 0; j < s.attributes.size(); ++j) {
    if (s.range[j]) {
      std::snprintf(buf, sizeof buf, "%-8s %8zu %12g %12g\n", s.attributes[j].c_str(), s.missing[j], s.range[j]->min,
                    s.range[j]->max);
    } else {
      std::snprintf(buf, sizeof buf, "%-8s %8zu %12s %12s\n", s.attributes[j].c_str(), s.missing[j], "-", "-");
    }
    out += buf;
  }
  return out;
}

}  // namespace ckd
