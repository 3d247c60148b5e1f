#pragma once

// Experiment configuration: a flat INI-style file of `key = value` lines
// grouped in [sections], with `#` comments.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "linkstab/linkmodel.hpp"
#include "linkstab/montecarlo.hpp"
#include "linkstab/numerics.hpp"

namespace linkstab::config {

enum class SweepVariable { DeltaT, SqrtD, Tau };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

// A grid written either as an explicit list or as linspace(lo, hi, n) /
// logspace(lo, hi, n). The written form is kept so it serializes back as is.
struct GridSpec {
  enum class Kind { List, Linear, Log };
  Kind kind = Kind::List;
  std::vector<double> values;  // List only
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  static GridSpec list(std::vector<double> v);
  static GridSpec linspace(double lo, double hi, int n);
  static GridSpec logspace(double lo, double hi, int n);

  std::vector<double> points() const;
  std::string to_string() const;
  static GridSpec parse(const std::string& text);
};

struct ExperimentConfig {
  // [mobility]
  double tau = 1.0;                     // s
  std::vector<double> sqrt_d{100.0};    // m/sqrt(s); several values only when sweeping delta_t
  double beta = 10.0;                   // m
  // [sampling]
  double delta_t = 1.0;                 // s, fixed sampling interval when it is not swept
  // [link]: r0 directly, or the link budget psi / gamma0 / eta
  std::optional<double> r0 = 50.0;      // m
  std::optional<double> psi;
  std::optional<double> gamma0;
  std::optional<double> eta;
  // [sweep]
  SweepVariable variable = SweepVariable::DeltaT;
  GridSpec grid = GridSpec::logspace(0.05, 10.0, 30);
  // [numerics]
  numerics::SeriesTruncation trunc;
  numerics::QuadratureSpec quad;
  // [mc]
  bool mc_enabled = false;
  montecarlo::McConfig mc;
  // [output]
  std::string output;  // empty: standard output

  linkmodel::ConnectionModel connection() const;
  // Throws DomainError on any violated invariant.
  void validate() const;
};

// Default sweep settings for each experiment.
enum class Experiment { MutualInfo, EntropyVsDt, EntropyVsD, EntropyVsTau };
ExperimentConfig default_config(Experiment e);

ExperimentConfig parse(std::istream& is);
ExperimentConfig load(const std::string& path);
void serialize(std::ostream& os, const ExperimentConfig& config);

bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace linkstab::config
