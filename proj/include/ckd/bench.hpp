#pragma once

// Benchmark configuration, the paired multi-classifier run and its report.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckd/classifier.hpp"
#include "ckd/dataset.hpp"
#include "ckd/error.hpp"
#include "ckd/evaluation.hpp"
#include "ckd/parallel.hpp"
#include "ckd/preprocess.hpp"
#include "ckd/text.hpp"
#include "ckd/version.hpp"

namespace ckd {

inline constexpr std::string_view kReportSchemaVersion = "ckd-bench/1";

// ---- configuration ----

enum class OutputKind { Text, Csv, Json, Svg };

inline std::string output_name(OutputKind o) {
  switch (o) {
    case OutputKind::Text: return "text";
    case OutputKind::Csv: return "csv";
    case OutputKind::Json: return "json";
    case OutputKind::Svg: return "svg";
  }
  return "text";
}

inline OutputKind parse_output(std::string_view s) {
  for (auto o : {OutputKind::Text, OutputKind::Csv, OutputKind::Json, OutputKind::Svg})
    if (s == output_name(o)) return o;
  throw Error(Errc::Config, "unknown output format '" + std::string(s) + "' (text, csv, json, svg)");
}

inline std::string data_format_name(DataFormat f) { return f == DataFormat::Csv ? "csv" : "arff"; }

/// csv for a .csv extension, arff otherwise.
inline DataFormat infer_data_format(const std::string& path) {
  return text::iequals(std::filesystem::path(path).extension().string(), ".csv") ? DataFormat::Csv
                                                                                   : DataFormat::Arff;
}

struct BenchConfig {
  std::string dataset;       // as written in the config
  std::string dataset_path;  // resolved against the config directory
  DataFormat format = DataFormat::Arff;
  std::uint64_t seed = 1;
  std::size_t folds = 5;
  bool stratified = false;
  ImputationScope scope = ImputationScope::WholeDataset;
  bool standardize = true;
  std::size_t threads = 0;  // concurrent classifiers; 0 = hardware concurrency
  std::vector<ClassifierSpec> classifiers;
  std::string output_dir = "results";
  std::vector<OutputKind> outputs{OutputKind::Text, OutputKind::Csv, OutputKind::Json, OutputKind::Svg};
};

namespace detail {

inline std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (value.empty() || ec != std::errc() || ptr != end)
    throw Error(Errc::Config, std::string(key) + ": expected an unsigned integer, got '" + std::string(value) + "'");
  return v;
}

inline bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = text::lower(value);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw Error(Errc::Config, std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

inline std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  for (auto item : text::split(value, ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline ClassifierSpec* find_spec(BenchConfig& cfg, ClassifierVariant v) {
  for (auto& s : cfg.classifiers)
    if (s.variant == v) return &s;
  return nullptr;
}

}  // namespace detail

/// Sets one hyperparameter given as "<classifier id>.<key>".
inline void set_classifier_override(BenchConfig& cfg, std::string_view dotted, std::string_view value) {
  const auto dot = dotted.find('.');
  if (dot == std::string_view::npos)
    throw Error(Errc::Config, "override '" + std::string(dotted) + "' must look like <classifier>.<key>");
  const auto v = parse_variant(dotted.substr(0, dot));
  auto* spec = detail::find_spec(cfg, v);
  if (!spec) throw Error(Errc::Config, "override for '" + variant_id(v) + "', which is not in the classifier list");
  apply_override(*spec, dotted.substr(dot + 1), value);
}

/// Range and consistency checks shared by the parser and command-line overrides.
inline void validate_config(const BenchConfig& cfg) {
  if (cfg.dataset.empty()) throw Error(Errc::Config, "benchmark.dataset is required");
  if (cfg.folds < 2) throw Error(Errc::Config, "benchmark.folds must be at least 2");
  if (cfg.classifiers.empty()) throw Error(Errc::Config, "benchmark.classifiers is empty");
  if (cfg.outputs.empty()) throw Error(Errc::Config, "benchmark.outputs is empty");
  for (const auto& s : cfg.classifiers) {
    try {
      validate_spec(s);
    } catch (const Error& e) {
      throw Error(Errc::Config, "classifier." + variant_id(s.variant) + ": " + e.message());
    }
  }
}

/// Strict INI: a [benchmark] section plus optional [classifier.<id>] sections
/// of hyperparameter overrides. Unknown sections or keys, duplicates and keys
/// outside a section are errors. Relative dataset paths resolve against
/// `base_dir`.
inline BenchConfig parse_config(std::string_view content, const std::string& base_dir = ".") {
  BenchConfig cfg;
  std::string section;
  std::map<std::string, std::map<std::string, std::string>> seen;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> overrides;
  std::optional<std::string> classifier_list, format;
  std::size_t line_no = 0;
  for (auto raw : text::lines(content)) {
    ++line_no;
    const auto line = text::trim(raw);
    const auto at = [&](const std::string& msg) {
      return Error(Errc::Config, "line " + std::to_string(line_no) + ": " + msg);
    };
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw at("unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (section != "benchmark" && !section.starts_with("classifier."))
        throw at("unknown section [" + section + "]");
      if (section.starts_with("classifier.")) parse_variant(std::string_view(section).substr(11));
      if (seen.count(section)) throw at("duplicate section [" + section + "]");
      seen[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw at("expected key = value");
    if (section.empty()) throw at("key outside a section");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (key.empty()) throw at("empty key");
    if (seen[section].count(key)) throw at("duplicate key '" + key + "'");
    seen[section][key] = value;
    if (section != "benchmark") {
      overrides[section.substr(11)].emplace_back(key, value);
      continue;
    }
    const std::string qk = "benchmark." + key;
    if (key == "dataset") cfg.dataset = value;
    else if (key == "format") format = value;
    else if (key == "seed") cfg.seed = detail::parse_u64(qk, value);
    else if (key == "folds") cfg.folds = detail::parse_u64(qk, value);
    else if (key == "stratified") cfg.stratified = detail::parse_bool(qk, value);
    else if (key == "imputation") cfg.scope = parse_scope(value);
    else if (key == "standardize") cfg.standardize = detail::parse_bool(qk, value);
    else if (key == "threads") cfg.threads = detail::parse_u64(qk, value);
    else if (key == "classifiers") classifier_list = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "outputs") {
      cfg.outputs.clear();
      for (const auto& o : detail::parse_list(value)) {
        const auto kind = parse_output(o);
        if (std::find(cfg.outputs.begin(), cfg.outputs.end(), kind) == cfg.outputs.end()) cfg.outputs.push_back(kind);
      }
    } else throw at("unknown key '" + key + "' in [benchmark]");
  }
  if (!seen.count("benchmark")) throw Error(Errc::Config, "missing [benchmark] section");

  if (!classifier_list) throw Error(Errc::Config, "benchmark.classifiers is required");
  if (text::trim(*classifier_list) == "all") {
    for (const auto& info : kVariants) cfg.classifiers.push_back(default_spec(info.variant));
  } else {
    for (const auto& id : detail::parse_list(*classifier_list)) {
      const auto v = parse_variant(id);
      if (detail::find_spec(cfg, v)) throw Error(Errc::Config, "classifier '" + id + "' listed twice");
      cfg.classifiers.push_back(default_spec(v));
    }
  }
  for (const auto& [id, kv] : overrides)
    for (const auto& [key, value] : kv) set_classifier_override(cfg, id + "." + key, value);

  std::filesystem::path p(cfg.dataset);
  cfg.dataset_path = (p.is_relative() && !cfg.dataset.empty() ? std::filesystem::path(base_dir) / p : p).string();
  cfg.format = format ? parse_data_format(*format) : infer_data_format(cfg.dataset);
  validate_config(cfg);
  return cfg;
}

inline BenchConfig load_config(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(text::read_file(path), dir.empty() ? "." : dir);
}

/// The settings that determine results; paths to outputs and thread counts
/// are left out so reports compare equal across machines and directories.
inline nlohmann::ordered_json config_to_json(const BenchConfig& cfg) {
  nlohmann::ordered_json j;
  j["dataset"] = cfg.dataset;
  j["format"] = data_format_name(cfg.format);
  j["seed"] = cfg.seed;
  j["folds"] = cfg.folds;
  j["stratified"] = cfg.stratified;
  j["imputation"] = scope_name(cfg.scope);
  j["standardize"] = cfg.standardize;
  auto& list = j["classifiers"] = nlohmann::ordered_json::array();
  for (const auto& s : cfg.classifiers) list.push_back(variant_id(s.variant));
  return j;
}

// ---- run ----

struct DatasetInfo {
  std::size_t rows = 0, positive = 0, negative = 0;
  std::string hash;  // FNV-1a of the file bytes
  friend bool operator==(const DatasetInfo&, const DatasetInfo&) = default;
};

struct ClassifierRun {
  ClassifierVariant variant{};
  std::optional<EvalResult> result;  // empty when the run failed
  std::string error;
  std::optional<Errc> error_code;  // empty for failures outside the library
  double seconds = 0.0;  // wall clock; kept out of the report JSON
  bool ok() const noexcept { return result.has_value(); }
};

struct BenchReport {
  nlohmann::ordered_json config;
  DatasetInfo dataset;
  std::string plan_hash;
  std::vector<ClassifierRun> runs;  // config order
  std::vector<ClassifierVariant> ranking;

  bool all_ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const ClassifierRun& r) { return r.ok(); });
  }
  const ClassifierRun* find(ClassifierVariant v) const {
    for (const auto& r : runs)
      if (r.variant == v) return &r;
    return nullptr;
  }
};

/// Successful runs by descending pooled accuracy, then failed runs; ties in
/// either group go to canonical variant order.
inline std::vector<ClassifierVariant> rank_runs(const std::vector<ClassifierRun>& runs) {
  std::vector<const ClassifierRun*> order;
  for (const auto& r : runs) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const ClassifierRun* a, const ClassifierRun* b) {
    if (a->ok() != b->ok()) return a->ok();
    if (a->ok()) {
      const double x = *a->result->pooled_metrics.accuracy, y = *b->result->pooled_metrics.accuracy;
      if (x != y) return x > y;
    }
    return variant_order(a->variant) < variant_order(b->variant);
  });
  std::vector<ClassifierVariant> out;
  for (const auto* r : order) out.push_back(r->variant);
  return out;
}

inline DatasetInfo dataset_info(const Dataset& ds, std::string_view file_bytes) {
  DatasetInfo info;
  info.rows = ds.size();
  for (std::size_t i = 0; i < ds.size(); ++i) (ds.is_positive(i) ? info.positive : info.negative)++;
  const auto h = fnv1a({reinterpret_cast<const unsigned char*>(file_bytes.data()), file_bytes.size()});
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  info.hash = buf;
  return info;
}

inline FoldPlan bench_plan(const BenchConfig& cfg, const Dataset& ds) {
  std::vector<int> labels;
  if (cfg.stratified)
    for (std::size_t i = 0; i < ds.size(); ++i) labels.push_back(ds.is_positive(i) ? 1 : 0);
  return kfold_partition(ds.size(), cfg.folds, cfg.seed, cfg.stratified, labels);
}

/// Called from worker threads when a classifier finishes.
using ProgressFn = std::function<void(const ClassifierRun&)>;

/// Evaluates every configured classifier on one shared fold plan. A failing
/// classifier is recorded and the others still run.
inline BenchReport run_benchmark(const BenchConfig& cfg, const Dataset& ds, std::string_view file_bytes,
                                 const ProgressFn& progress = {}) {
  validate_config(cfg);
  const auto plan = bench_plan(cfg, ds);
  BenchReport rep;
  rep.config = config_to_json(cfg);
  rep.dataset = dataset_info(ds, file_bytes);
  rep.plan_hash = plan.hash();
  rep.runs.resize(cfg.classifiers.size());
  std::mutex progress_mutex;
  parallel_for(cfg.classifiers.size(), cfg.threads, [&](std::size_t i) {
    const auto& spec = cfg.classifiers[i];
    auto& run = rep.runs[i];
    run.variant = spec.variant;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run.result = cross_validate(spec, ds, plan, {cfg.scope, cfg.standardize, 1});
    } catch (const Error& e) {
      run.error = e.what();
      run.error_code = e.code();
    } catch (const std::exception& e) {
      run.error = e.what();
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(run);
    }
  });
  rep.ranking = rank_runs(rep.runs);
  return rep;
}

inline BenchReport run_benchmark(const BenchConfig& cfg, const ProgressFn& progress = {}) {
  const auto bytes = text::read_file(cfg.dataset_path);
  const auto ds = apply_schema(parse_table(bytes, cfg.format), ckd_schema());
  return run_benchmark(cfg, ds, bytes, progress);
}

// ---- report JSON ----

inline Errc parse_errc(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(Errc::Io); ++c)
    if (errc_name(static_cast<Errc>(c)) == name) return static_cast<Errc>(c);
  throw Error(Errc::Config, "unknown error code '" + std::string(name) + "'");
}

inline nlohmann::ordered_json report_to_json(const BenchReport& rep) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["code_version"] = kVersion;
  j["config"] = rep.config;
  j["dataset"] = {{"rows", rep.dataset.rows},
                  {"positive", rep.dataset.positive},
                  {"negative", rep.dataset.negative},
                  {"hash", rep.dataset.hash}};
  j["plan_hash"] = rep.plan_hash;
  auto& ranking = j["ranking"] = nlohmann::ordered_json::array();
  for (auto v : rep.ranking) ranking.push_back(variant_id(v));
  auto& results = j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.runs) {
    nlohmann::ordered_json e;
    e["classifier"] = variant_id(r.variant);
    e["name"] = variant_display(r.variant);
    e["status"] = r.ok() ? "ok" : "failed";
    if (r.ok()) e["evaluation"] = eval_to_json(*r.result);
    else {
      e["error"] = r.error;
      e["error_code"] = r.error_code ? nlohmann::ordered_json(errc_name(*r.error_code)) : nlohmann::ordered_json();
    }
    results.push_back(std::move(e));
  }
  return j;
}

inline BenchReport report_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("schema_version") != kReportSchemaVersion)
      throw Error(Errc::Config, "unsupported report schema '" + j.at("schema_version").get<std::string>() + "'");
    BenchReport rep;
    rep.config = j.at("config");
    const auto& d = j.at("dataset");
    rep.dataset = {d.at("rows").get<std::size_t>(), d.at("positive").get<std::size_t>(),
                   d.at("negative").get<std::size_t>(), d.at("hash").get<std::string>()};
    rep.plan_hash = j.at("plan_hash").get<std::string>();
    for (const auto& id : j.at("ranking")) rep.ranking.push_back(parse_variant(id.get<std::string>()));
    for (const auto& e : j.at("results")) {
      ClassifierRun r;
      r.variant = parse_variant(e.at("classifier").get<std::string>());
      if (e.at("status") == "ok") r.result = eval_from_json(e.at("evaluation"));
      else {
        r.error = e.at("error").get<std::string>();
        if (!e.at("error_code").is_null()) r.error_code = parse_errc(e.at("error_code").get<std::string>());
      }
      rep.runs.push_back(std::move(r));
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Config, std::string("malformed report: ") + e.what());
  }
}

/// Wall-clock seconds per classifier, written apart from the report so that
/// the report itself stays byte-reproducible.
inline nlohmann::ordered_json timings_to_json(const BenchReport& rep) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  double total = 0.0;
  for (const auto& r : rep.runs) {
    j[variant_id(r.variant)] = r.seconds;
    total += r.seconds;
  }
  j["sum_seconds"] = total;
  return j;
}

// ---- exit codes ----

inline constexpr int kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitInternal = 4;

/// Configuration and argument problems are usage errors; anything about the
/// data or a model fit is a data error.
inline int exit_code_for(Errc c) {
  switch (c) {
    case Errc::Config:
    case Errc::BadSpec:
    case Errc::BadK: return kExitUsage;
    default: return kExitData;
  }
}

/// Exit status of a finished benchmark: 0 when every classifier ran, the data
/// code when all failures are library errors, the internal code otherwise.
inline int exit_code_for(const BenchReport& rep) {
  int code = kExitOk;
  for (const auto& r : rep.runs) {
    if (r.ok()) continue;
    if (!r.error_code) return kExitInternal;
    code = kExitData;
  }
  return code;
}

}  // namespace ckd
