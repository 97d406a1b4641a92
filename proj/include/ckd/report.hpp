#pragma once

// Table and SVG chart rendering for benchmark reports.

#include <algorithm>
#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ckd/bench.hpp"
#include "ckd/text.hpp"

namespace ckd {

/// Runs in canonical variant order, which is also the table row order.
inline std::vector<const ClassifierRun*> canonical_runs(const BenchReport& rep) {
  std::vector<const ClassifierRun*> out;
  for (const auto& r : rep.runs) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const ClassifierRun* a, const ClassifierRun* b) {
    return variant_order(a->variant) < variant_order(b->variant);
  });
  return out;
}

/// Four decimals, or "NA" when undefined.
inline std::string format_metric(const std::optional<double>& v) { return v ? text::format_fixed(*v, 4) : "NA"; }

namespace detail {

inline std::array<std::string, 4> metric_cells(const std::optional<Metrics>& m) {
  if (!m) return {"NA", "NA", "NA", "NA"};
  return {format_metric(m->accuracy), format_metric(m->sensitivity), format_metric(m->precision),
          format_metric(m->specificity)};
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::string pad_left(const std::string& s, std::size_t w) {
  return s.size() < w ? std::string(w - s.size(), ' ') + s : s;
}

inline std::string text_block(const BenchReport& rep, const std::string& title, bool pooled) {
  static const std::array<std::string, 4> heads{"Accuracy", "Sensitivity", "Precision", "Specificity"};
  const auto runs = canonical_runs(rep);
  std::size_t name_w = 10;
  for (const auto* r : runs) name_w = std::max(name_w, variant_display(r->variant).size());
  std::string out = title + "\n" + pad_right("Classifier", name_w);
  for (const auto& h : heads) out += "  " + h;
  out += "\n" + std::string(name_w + 2 * 4 + 8 + 11 + 9 + 11, '-') + "\n";
  for (const auto* r : runs) {
    std::optional<Metrics> m;
    if (r->ok()) m = pooled ? r->result->pooled_metrics : r->result->fold_mean;
    const auto cells = metric_cells(m);
    out += pad_right(variant_display(r->variant), name_w);
    for (std::size_t c = 0; c < 4; ++c) out += "  " + pad_left(cells[c], heads[c].size());
    if (!r->ok()) out += "  (failed)";
    out += "\n";
  }
  return out;
}

}  // namespace detail

enum class TableFormat { Text, Csv, Json };

inline TableFormat parse_table_format(std::string_view s) {
  if (s == "text") return TableFormat::Text;
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  throw Error(Errc::Config, "unknown table format '" + std::string(s) + "' (text, csv, json)");
}

/// Classifier | Accuracy | Sensitivity | Precision | Specificity from the
/// pooled confusion matrices. The text form adds the fold-mean view and the
/// ranking; the JSON form is the full report.
inline std::string render_table(const BenchReport& rep, TableFormat fmt) {
  switch (fmt) {
    case TableFormat::Csv: {
      std::string out = "Classifier,Accuracy,Sensitivity,Precision,Specificity\r\n";
      for (const auto* r : canonical_runs(rep)) {
        out += detail::csv_field(variant_display(r->variant));
        for (const auto& c : detail::metric_cells(r->ok() ? std::optional(r->result->pooled_metrics) : std::nullopt))
          out += "," + c;
        out += "\r\n";
      }
      return out;
    }
    case TableFormat::Json: return report_to_json(rep).dump(2) + "\n";
    case TableFormat::Text: break;
  }
  std::string out = detail::text_block(rep, "Pooled out-of-fold metrics", true) + "\n" +
                    detail::text_block(rep, "Mean of per-fold metrics", false) + "\nRanking by pooled accuracy\n";
  std::size_t rank = 0;
  for (auto v : rep.ranking) {
    const auto* r = rep.find(v);
    out += detail::pad_left(std::to_string(++rank), 3) + ". " + variant_display(v) + "  " +
           (r && r->ok() ? format_metric(r->result->pooled_metrics.accuracy) : "failed") + "\n";
  }
  out += "\nfolds " + std::to_string(rep.config.value("folds", 0)) + ", seed " +
         std::to_string(rep.config.value("seed", std::uint64_t{0})) + ", plan " + rep.plan_hash + ", dataset " +
         std::to_string(rep.dataset.rows) + " rows (" + std::to_string(rep.dataset.positive) + " positive / " +
         std::to_string(rep.dataset.negative) + " negative)\n";
  return out;
}

// ---- SVG charts ----

/// Plot geometry shared by both charts. Bars map [0, 1] onto kPlotHeight pixels.
struct ChartLayout {
  static constexpr double kLeft = 70, kTop = 50, kPlotHeight = 300, kBottom = 150, kRight = 30;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string px(double v) { return text::format_fixed(v, 3); }

struct SvgBar {
  double value;
  std::string metric;
  std::string fill;
};

struct SvgGroup {
  std::string label;
  std::vector<std::optional<SvgBar>> bars;  // empty = undefined value, no bar drawn
};

inline std::string svg_chart(const std::string& title, const std::vector<SvgGroup>& groups, bool percent,
                             const std::vector<std::pair<std::string, std::string>>& legend) {
  using L = ChartLayout;
  const std::size_t per_group = groups.empty() ? 1 : std::max<std::size_t>(1, groups.front().bars.size());
  const double bar_w = 22, group_gap = 18;
  const double group_w = per_group * bar_w + group_gap;
  const double plot_w = std::max(240.0, groups.size() * group_w);
  const double width = L::kLeft + plot_w + L::kRight, height = L::kTop + L::kPlotHeight + L::kBottom;
  const double base = L::kTop + L::kPlotHeight;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" + px(height) +
       "\" viewBox=\"0 0 " + px(width) + " " + px(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + px(width) + "\" height=\"" + px(height) +
       "\" fill=\"white\"/>\n";
  s += "<text class=\"title\" x=\"" + px(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
       xml_escape(title) + "</text>\n";
  s += "<g class=\"y-axis\" data-min=\"0\" data-max=\"1\" data-plot-top=\"" + px(L::kTop) + "\" data-plot-height=\"" +
       px(L::kPlotHeight) + "\">\n";
  for (int t = 0; t <= 10; t += 2) {
    const double y = base - L::kPlotHeight * t / 10.0;
    const std::string label = percent ? std::to_string(t * 10) + "%" : text::format_fixed(t / 10.0, 1);
    s += "<line x1=\"" + px(L::kLeft) + "\" y1=\"" + px(y) + "\" x2=\"" + px(L::kLeft + plot_w) + "\" y2=\"" + px(y) +
         "\" stroke=\"#dddddd\"/>\n";
    s += "<text class=\"tick\" x=\"" + px(L::kLeft - 6) + "\" y=\"" + px(y + 4) + "\" text-anchor=\"end\">" + label +
         "</text>\n";
  }
  s += "<line x1=\"" + px(L::kLeft) + "\" y1=\"" + px(L::kTop) + "\" x2=\"" + px(L::kLeft) + "\" y2=\"" + px(base) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + px(L::kLeft) + "\" y1=\"" + px(base) + "\" x2=\"" + px(L::kLeft + plot_w) + "\" y2=\"" +
       px(base) + "\" stroke=\"black\"/>\n</g>\n";

  const double offset = (plot_w - groups.size() * group_w) / 2;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = L::kLeft + offset + g * group_w + group_gap / 2;
    s += "<g class=\"classifier\" data-name=\"" + xml_escape(groups[g].label) + "\">\n";
    for (std::size_t b = 0; b < groups[g].bars.size(); ++b) {
      const double x = gx + b * bar_w;
      const auto& bar = groups[g].bars[b];
      if (!bar) {
        s += "<text class=\"value\" x=\"" + px(x + bar_w / 2) + "\" y=\"" + px(base - 4) +
             "\" text-anchor=\"middle\" font-size=\"8\">NA</text>\n";
        continue;
      }
      const double h = L::kPlotHeight * std::clamp(bar->value, 0.0, 1.0);
      s += "<rect class=\"bar\" data-metric=\"" + bar->metric + "\" data-value=\"" + text::format_real(bar->value) +
           "\" x=\"" + px(x + 1) + "\" y=\"" + px(base - h) + "\" width=\"" + px(bar_w - 2) + "\" height=\"" + px(h) +
           "\" fill=\"" + bar->fill + "\"/>\n";
      s += "<text class=\"value\" transform=\"translate(" + px(x + bar_w / 2 + 3) + "," + px(base - h - 4) +
           ") rotate(-90)\" font-size=\"9\">" + text::format_fixed(bar->value, 4) + "</text>\n";
    }
    const double cx = gx + groups[g].bars.size() * bar_w / 2;
    s += "<text class=\"label\" transform=\"translate(" + px(cx + 3) + "," + px(base + 8) +
         ") rotate(60)\">" + xml_escape(groups[g].label) + "</text>\n</g>\n";
  }
  double lx = L::kLeft;
  for (const auto& [name, fill] : legend) {
    s += "<rect class=\"legend\" x=\"" + px(lx) + "\" y=\"32\" width=\"10\" height=\"10\" fill=\"" + fill + "\"/>\n";
    s += "<text class=\"legend\" x=\"" + px(lx + 14) + "\" y=\"41\">" + xml_escape(name) + "</text>\n";
    lx += 100;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace detail

struct Charts {
  std::string accuracy;  // one bar per classifier, 0-100% axis
  std::string metrics;   // sensitivity, precision and specificity per classifier, [0, 1] axis
};

/// Failed classifiers keep their slot and label but get no bars.
inline Charts render_charts(const BenchReport& rep) {
  std::vector<detail::SvgGroup> acc, grouped;
  for (const auto* r : canonical_runs(rep)) {
    const auto name = variant_display(r->variant);
    detail::SvgGroup a{name, {}}, g{name, {}};
    if (r->ok()) {
      const auto& m = r->result->pooled_metrics;
      auto bar = [](const std::optional<double>& v, const char* metric, const char* fill) {
        return v ? std::optional(detail::SvgBar{*v, metric, fill}) : std::nullopt;
      };
      a.bars.push_back(bar(m.accuracy, "accuracy", "#4e79a7"));
      g.bars.push_back(bar(m.sensitivity, "sensitivity", "#4e79a7"));
      g.bars.push_back(bar(m.precision, "precision", "#f28e2b"));
      g.bars.push_back(bar(m.specificity, "specificity", "#59a14f"));
    }
    acc.push_back(std::move(a));
    grouped.push_back(std::move(g));
  }
  return {detail::svg_chart("Predictive accuracy (pooled, " + std::to_string(rep.config.value("folds", 0)) +
                                "-fold cross-validation)",
                            acc, true, {}),
          detail::svg_chart("Sensitivity, precision and specificity (pooled)", grouped, false,
                            {{"Sensitivity", "#4e79a7"}, {"Precision", "#f28e2b"}, {"Specificity", "#59a14f"}})};
}

/// Writes the selected artifacts into `dir` and returns the file names written.
/// timings.json is always written beside them.
inline std::vector<std::string> write_report_files(const BenchReport& rep, const std::vector<OutputKind>& outputs,
                                                   const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create output directory '" + dir + "': " + ec.message());
  const auto path = [&](const std::string& name) { return (std::filesystem::path(dir) / name).string(); };
  std::vector<std::string> written;
  const auto put = [&](const std::string& name, const std::string& content) {
    text::write_file(path(name), content);
    written.push_back(name);
  };
  for (auto o : outputs) {
    switch (o) {
      case OutputKind::Text: put("table.txt", render_table(rep, TableFormat::Text)); break;
      case OutputKind::Csv: put("table.csv", render_table(rep, TableFormat::Csv)); break;
      case OutputKind::Json: put("report.json", render_table(rep, TableFormat::Json)); break;
      case OutputKind::Svg: {
        const auto charts = render_charts(rep);
        put("accuracy.svg", charts.accuracy);
        put("metrics.svg", charts.metrics);
        break;
      }
    }
  }
  put("timings.json", timings_to_json(rep).dump(2) + "\n");
  return written;
}

}  // namespace ckd
