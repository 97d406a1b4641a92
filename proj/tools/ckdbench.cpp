// ckdbench: cross-validated benchmark of the twelve CKD classifiers.
// Machine output (tables, summaries) goes to stdout; progress and errors to stderr.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ckd/bench.hpp"
#include "ckd/dataset.hpp"
#include "ckd/report.hpp"
#include "ckd/version.hpp"

namespace {

struct ConfigOverrides {
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::vector<std::string> sets;
};

void add_override_options(CLI::App& cmd, ConfigOverrides& o) {
  o.seed_opt = cmd.add_option("--seed", o.seed, "Override benchmark.seed");
  cmd.add_option("--set", o.sets, "Hyperparameter override <classifier>.<key>=<value> (repeatable)");
}

ckd::BenchConfig load_with_overrides(const std::string& path, const ConfigOverrides& o) {
  auto cfg = ckd::load_config(path);
  if (o.seed_opt->count()) cfg.seed = o.seed;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ckd::Error(ckd::Errc::Config, "--set expects <classifier>.<key>=<value>");
    ckd::set_classifier_override(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  ckd::validate_config(cfg);
  return cfg;
}

ckd::Dataset load_checked(const ckd::BenchConfig& cfg, std::string& bytes) {
  bytes = ckd::text::read_file(cfg.dataset_path);
  try {
    return ckd::apply_schema(ckd::parse_table(bytes, cfg.format), ckd::ckd_schema());
  } catch (const ckd::Error& e) {
    throw ckd::Error(e.code(), cfg.dataset_path + ": " + e.message());
  }
}

int cmd_run(const std::string& config_path, const ConfigOverrides& o, const std::string& out_dir,
            const std::string& formats, std::size_t threads, bool threads_set, bool quiet) {
  auto cfg = load_with_overrides(config_path, o);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (threads_set) cfg.threads = threads;
  if (!formats.empty()) {
    cfg.outputs.clear();
    for (const auto& f : ckd::detail::parse_list(formats)) cfg.outputs.push_back(ckd::parse_output(f));
  }
  ckd::validate_config(cfg);
  std::string bytes;
  const auto ds = load_checked(cfg, bytes);
  if (!quiet)
    std::cerr << "ckdbench: " << cfg.classifiers.size() << " classifiers, " << cfg.folds << " folds, seed "
              << cfg.seed << ", " << ds.size() << " rows\n";
  const auto report = ckd::run_benchmark(cfg, ds, bytes, [&](const ckd::ClassifierRun& r) {
    if (r.ok()) {
      if (!quiet)
        std::cerr << "  " << ckd::variant_id(r.variant) << "  accuracy "
                  << ckd::format_metric(r.result->pooled_metrics.accuracy) << "  ("
                  << ckd::text::format_fixed(r.seconds, 2) << " s)\n";
    } else {
      std::cerr << "  " << ckd::variant_id(r.variant) << "  FAILED: " << r.error << "\n";
    }
  });
  const auto written = ckd::write_report_files(report, cfg.outputs, cfg.output_dir);
  if (!quiet)
    for (const auto& f : written) std::cerr << "wrote " << cfg.output_dir << "/" << f << "\n";

  auto table = ckd::TableFormat::Text;
  for (auto kind : cfg.outputs) {
    if (kind == ckd::OutputKind::Svg) continue;
    table = kind == ckd::OutputKind::Csv ? ckd::TableFormat::Csv
            : kind == ckd::OutputKind::Json ? ckd::TableFormat::Json
                                             : ckd::TableFormat::Text;
    break;
  }
  std::cout << ckd::render_table(report, table);
  return ckd::exit_code_for(report);
}

int cmd_validate(const std::string& config_path, const ConfigOverrides& o) {
  const auto cfg = load_with_overrides(config_path, o);
  std::string bytes;
  const auto ds = load_checked(cfg, bytes);
  ckd::bench_plan(cfg, ds);
  const auto info = ckd::dataset_info(ds, bytes);
  std::cout << "config ok: " << cfg.classifiers.size() << " classifiers, " << cfg.folds << " folds, seed " << cfg.seed
            << "; dataset " << cfg.dataset_path << ": " << info.rows << " rows, " << info.positive << " positive / "
            << info.negative << " negative\n";
  return ckd::kExitOk;
}

int cmd_inspect(const std::string& path, const std::string& data_format, const std::string& format) {
  if (format != "text" && format != "json") throw ckd::Error(ckd::Errc::Config, "--format must be text or json");
  const auto fmt = data_format.empty() ? ckd::infer_data_format(path) : ckd::parse_data_format(data_format);
  ckd::Dataset ds;
  try {
    ds = ckd::load_dataset(path, fmt);
  } catch (const ckd::Error& e) {
    if (e.code() == ckd::Errc::Io) throw;
    throw ckd::Error(e.code(), path + ": " + e.message());
  }
  const auto s = ckd::summarize(ds);
  std::cout << (format == "json" ? ckd::summary_to_json(s).dump(2) + "\n" : ckd::summary_to_text(s));
  return ckd::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-validated benchmark of twelve classifiers on the chronic kidney disease data"};
  app.set_version_flag("--version", std::string(ckd::kVersion));
  app.require_subcommand(1);

  std::string config_path, dataset_path, out_dir, formats, inspect_format = "text", data_format;
  std::size_t threads = 0;
  bool quiet = false;
  ConfigOverrides run_o, validate_o;

  auto* run = app.add_subcommand("run", "Run the benchmark described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  add_override_options(*run, run_o);
  run->add_option("--out", out_dir, "Override benchmark.output_dir");
  run->add_option("--format", formats, "Override benchmark.outputs (comma list of text, csv, json, svg)");
  auto* threads_opt = run->add_option("--threads", threads, "Concurrent classifiers (0 = all cores)");
  run->add_flag("--quiet,-q", quiet, "Only report failures on stderr");

  auto* validate = app.add_subcommand("validate", "Check a config and its dataset without training");
  validate->add_option("config", config_path, "Config file")->required();
  add_override_options(*validate, validate_o);

  auto* inspect = app.add_subcommand("inspect", "Summarize a dataset file");
  inspect->add_option("dataset", dataset_path, "ARFF or CSV file")->required();
  inspect->add_option("--format", inspect_format, "text or json");
  inspect->add_option("--data-format", data_format, "arff or csv (default: from the extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ckdbench: " << e.what() << "\n" << "run 'ckdbench --help' for usage\n";
    return ckd::kExitUsage;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, run_o, out_dir, formats, threads, threads_opt->count() > 0, quiet);
    if (validate->parsed()) return cmd_validate(config_path, validate_o);
    return cmd_inspect(dataset_path, data_format, inspect_format);
  } catch (const ckd::Error& e) {
    std::cerr << "ckdbench: " << e.what() << "\n";
    return ckd::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "ckdbench: internal error: " << e.what() << "\n";
    return ckd::kExitInternal;
  }
}
