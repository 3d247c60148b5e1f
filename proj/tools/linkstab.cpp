// Command-line runner for the link-stability sweeps.
//
//   linkstab sweep-mi [--config f] [--mc] [--jobs n] [--seed s] [--out f]
//   linkstab sweep-entropy-dt | sweep-entropy-d | sweep-entropy-tau  (same flags)
//   linkstab validate [--config f] [--jobs n] [--seed s] [--out f]
//   linkstab plot <csv> [--out f.svg]
//
// Exit status: 0 success, 1 usage or input error, 2 validation failure,
// 3 numerical non-convergence.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "linkstab/config.hpp"
#include "linkstab/errors.hpp"
#include "linkstab/experiments.hpp"
#include "linkstab/plot.hpp"

namespace {

using namespace linkstab;

constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool mc = false;
  unsigned jobs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_mc_flag) {
  cmd->add_option("--config", o.config_path, "experiment configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Monte Carlo root seed (overrides the config)");
  cmd->add_option("--out", o.out, "output path (default: config, else standard output)");
  cmd->add_option("--jobs", o.jobs, "worker threads (default: hardware concurrency)");
  if (with_mc_flag) cmd->add_flag("--mc", o.mc, "append Monte Carlo overlay columns");
}

config::ExperimentConfig resolve_config(const CommonOptions& o, config::ExperimentConfig fallback) {
  config::ExperimentConfig c = o.config_path.empty() ? std::move(fallback) : config::load(o.config_path);
  if (o.seed) c.mc.seed = *o.seed;
  if (!o.out.empty()) c.output = o.out;
  if (o.mc) c.mc_enabled = true;
  c.validate();
  return c;
}

unsigned jobs_of(const CommonOptions& o) {
  if (o.jobs > 0) return o.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Writes to `path`, or standard output when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
}

int run_sweep(const CommonOptions& o, config::Experiment kind, config::SweepVariable expected,
              experiments::Table table) {
  const config::ExperimentConfig c = resolve_config(o, config::default_config(kind));
  if (c.variable != expected)
    throw DomainError("this subcommand sweeps " + config::to_string(expected) + " but the config sweeps " +
                      config::to_string(c.variable));
  const auto results = experiments::run_sweep(c, jobs_of(o), c.mc_enabled, &std::cerr);
  std::ostringstream os;
  experiments::write_csv(os, table, results);
  emit(c.output, os.str());
  return 0;
}

config::ExperimentConfig default_validation_config() {
  config::ExperimentConfig c = config::default_config(config::Experiment::EntropyVsDt);
  c.grid = config::GridSpec::list({0.2, 0.5, 1.0, 2.0, 5.0});
  return c;
}

int run_validate(const CommonOptions& o) {
  const config::ExperimentConfig c = resolve_config(o, default_validation_config());
  const auto results = experiments::run_sweep(c, jobs_of(o), true);
  std::vector<experiments::ValidationRow> rows;
  for (const auto& r : results) {
    const auto part = experiments::validation_rows(r);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::ostringstream os;
  experiments::write_validation_csv(os, rows);
  emit(c.output, os.str());
  if (!experiments::passed(rows)) {
    std::cerr << "validation failed: some |z| > " << experiments::kMaxAbsZ << " or entropy gap >= "
              << experiments::kMaxEntropyGapBits << " bit\n";
    return kExitValidation;
  }
  return 0;
}

int run_plot(const std::string& csv_path, const std::string& out) {
  std::ifstream in(csv_path);
  if (!in) throw DomainError("cannot open '" + csv_path + "'");
  const plot::Chart chart = plot::chart_from_table(plot::read_csv(in));
  emit(out, plot::render_svg(chart));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link stability under Ornstein-Uhlenbeck mobility"};
  app.require_subcommand(1);

  CommonOptions mi_opts, hdt_opts, hd_opts, htau_opts, val_opts;
  auto* mi = app.add_subcommand("sweep-mi", "mutual-information ratio R_MI versus delta_t");
  add_common(mi, mi_opts, true);
  auto* hdt = app.add_subcommand("sweep-entropy-dt", "entropy rate versus delta_t");
  add_common(hdt, hdt_opts, true);
  auto* hd = app.add_subcommand("sweep-entropy-d", "entropy rate versus sqrt(D)");
  add_common(hd, hd_opts, true);
  auto* htau = app.add_subcommand("sweep-entropy-tau", "entropy rate versus tau");
  add_common(htau, htau_opts, true);
  auto* val = app.add_subcommand("validate", "analytical versus Monte Carlo report");
  add_common(val, val_opts, false);

  std::string plot_csv, plot_out;
  auto* pl = app.add_subcommand("plot", "render a sweep CSV as an SVG line chart");
  pl->add_option("csv", plot_csv, "sweep CSV file")->required()->check(CLI::ExistingFile);
  pl->add_option("--out", plot_out, "SVG output path (default: standard output)");

  CLI11_PARSE(app, argc, argv);

  using config::Experiment;
  using config::SweepVariable;
  using experiments::Table;
  try {
    if (mi->parsed()) return run_sweep(mi_opts, Experiment::MutualInfo, SweepVariable::DeltaT, Table::MutualInfo);
    if (hdt->parsed())
      return run_sweep(hdt_opts, Experiment::EntropyVsDt, SweepVariable::DeltaT, Table::EntropyVsDt);
    if (hd->parsed()) return run_sweep(hd_opts, Experiment::EntropyVsD, SweepVariable::SqrtD, Table::EntropyVsD);
    if (htau->parsed())
      return run_sweep(htau_opts, Experiment::EntropyVsTau, SweepVariable::Tau, Table::EntropyVsTau);
    if (val->parsed()) return run_validate(val_opts);
    if (pl->parsed()) return run_plot(plot_csv, plot_out);
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
