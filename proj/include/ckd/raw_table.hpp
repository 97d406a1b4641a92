#pragma once

// Text ingestion: ARFF and headed CSV into an untyped RawTable. Typing and
// domain checks happen later, in apply_schema.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckd/error.hpp"
#include "ckd/text.hpp"

namespace ckd {

struct RawAttribute {
  std::string name;
  std::string type;                         // declared type keyword, lower-cased; "nominal" for {..}
  std::vector<std::string> nominal_values;  // lower-cased, only for nominal declarations

  bool is_nominal() const noexcept { return type == "nominal"; }
};

struct RawRow {
  std::size_t line = 0;                         // 1-based source line
  std::vector<std::optional<std::string>> cells;  // nullopt = missing marker
};

struct RawTable {
  std::string relation;
  std::vector<RawAttribute> attributes;
  std::vector<RawRow> rows;
  std::vector<std::size_t> repaired_lines;  // rows that had stray empty fields removed
};

namespace detail {

inline std::string unquote(std::string_view s) {
  s = text::trim(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return std::string(s);
}

// Name token of an @attribute line (quoted or bare) and the remainder.
inline std::pair<std::string, std::string_view> split_attribute_decl(std::string_view rest, std::size_t line) {
  rest = text::trim(rest);
  if (rest.empty()) throw Error(Errc::MalformedHeader, "line " + std::to_string(line) + ": @attribute without a name");
  if (rest.front() == '\'' || rest.front() == '"') {
    const auto close = rest.find(rest.front(), 1);
    if (close == std::string_view::npos)
      throw Error(Errc::MalformedHeader, "line " + std::to_string(line) + ": unterminated attribute name");
    return {std::string(rest.substr(1, close - 1)), text::trim(rest.substr(close + 1))};
  }
  std::size_t end = 0;
  while (end < rest.size() && !text::is_space(rest[end]) && rest[end] != '{') ++end;
  return {std::string(rest.substr(0, end)), text::trim(rest.substr(end))};
}

// Splits one data line, trimming every field. A line with more fields than
// expected is accepted when dropping its empty fields gives exactly
// `expected` (stray commas); `repaired` reports that case.
inline std::vector<std::string_view> split_record(std::string_view line, std::size_t expected,
                                                  std::size_t line_no, bool& repaired) {
  auto fields = text::split(line, ',');
  for (auto& f : fields) f = text::trim(f);
  repaired = false;
  if (fields.size() > expected) {
    std::vector<std::string_view> kept;
    for (auto f : fields)
      if (!f.empty()) kept.push_back(f);
    if (kept.size() == expected) {
      repaired = true;
      return kept;
    }
  }
  if (fields.size() != expected)
    throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(expected) + " fields, found " +
                                           std::to_string(fields.size()));
  return fields;
}

inline RawRow make_row(const std::vector<std::string_view>& fields, const std::vector<RawAttribute>& attrs,
                       std::size_t line_no) {
  RawRow row;
  row.line = line_no;
  row.cells.reserve(fields.size());
  for (std::size_t j = 0; j < fields.size(); ++j) {
    if (fields[j] == "?") {
      row.cells.emplace_back(std::nullopt);
    } else if (attrs[j].is_nominal()) {
      row.cells.emplace_back(text::lower(fields[j]));
    } else {
      row.cells.emplace_back(std::string(fields[j]));
    }
  }
  return row;
}

}  // namespace detail

/// Parses ARFF text: '@relation', '@attribute', '@data' (case-insensitive),
/// '%' comment lines, '?' for missing cells. Nominal tokens are lower-cased.
inline RawTable parse_arff(std::string_view input) {
  RawTable t;
  bool in_data = false;
  bool seen_data = false;
  const auto all = text::lines(input);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto line = text::trim(all[i]);
    if (line.empty() || line.front() == '%') continue;
    if (!in_data) {
      if (text::istarts_with(line, "@relation")) {
        t.relation = detail::unquote(line.substr(9));
      } else if (text::istarts_with(line, "@attribute")) {
        auto [name, type] = detail::split_attribute_decl(line.substr(10), line_no);
        RawAttribute attr{std::move(name), {}, {}};
        if (!type.empty() && type.front() == '{') {
          const auto close = type.find('}');
          if (close == std::string_view::npos)
            throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": unterminated nominal list");
          attr.type = "nominal";
          for (auto v : text::split(type.substr(1, close - 1), ','))
            attr.nominal_values.push_back(text::lower(detail::unquote(v)));
        } else if (!type.empty()) {
          attr.type = text::lower(text::trim(type));
        } else {
          throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": attribute without type");
        }
        t.attributes.push_back(std::move(attr));
      } else if (text::istarts_with(line, "@data")) {
        if (t.attributes.empty())
          throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": @data before any @attribute");
        in_data = seen_data = true;
      } else {
        throw Error(Errc::MalformedHeader, "line " + std::to_string(line_no) + ": unexpected header line");
      }
      continue;
    }
    bool repaired = false;
    const auto fields = detail::split_record(line, t.attributes.size(), line_no, repaired);
    if (repaired) t.repaired_lines.push_back(line_no);
    t.rows.push_back(detail::make_row(fields, t.attributes, line_no));
  }
  if (!seen_data) throw Error(Errc::MalformedHeader, "no @data section");
  if (t.rows.empty()) throw Error(Errc::EmptyData, "no data rows after @data");
  return t;
}

/// Parses CSV whose first non-blank line is a header of column names. Fields
/// are trimmed; '?' marks missing cells. Every column is declared "string";
/// apply_schema decides the types.
inline RawTable parse_csv(std::string_view input) {
  RawTable t;
  const auto all = text::lines(input);
  std::size_t i = 0;
  while (i < all.size() && text::trim(all[i]).empty()) ++i;
  if (i == all.size()) throw Error(Errc::MalformedHeader, "missing CSV header row");
  for (auto name : text::split(text::trim(all[i]), ','))
    t.attributes.push_back({detail::unquote(name), "string", {}});
  for (++i; i < all.size(); ++i) {
    const auto line = text::trim(all[i]);
    if (line.empty()) continue;
    bool repaired = false;
    const auto fields = detail::split_record(line, t.attributes.size(), i + 1, repaired);
    if (repaired) t.repaired_lines.push_back(i + 1);
    t.rows.push_back(detail::make_row(fields, t.attributes, i + 1));
  }
  if (t.rows.empty()) throw Error(Errc::EmptyData, "no data rows in CSV");
  return t;
}

}  // namespace ckd
