#pragma once

// Parameter sweeps over an ExperimentConfig, their CSV output, and the
// analytical-versus-simulation validation report.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "linkstab/config.hpp"
#include "linkstab/linkmodel.hpp"
#include "linkstab/montecarlo.hpp"

namespace linkstab::experiments {

struct GridPoint {
  double delta_t = 1.0;  // s
  double tau = 1.0;      // s
  double sqrt_d = 100.0; // m/sqrt(s)
};

/// Grid points in output order: for each sqrt_d value (outer), the swept
/// variable in increasing order.
std::vector<GridPoint> expand_grid(const config::ExperimentConfig& config);

struct McOverlay {
  montecarlo::McTransition transition;
  montecarlo::McEstimate steady_on;
  montecarlo::McEstimate entropy_rate;
  std::optional<montecarlo::McEstimate> r_mi;
};

struct PointResult {
  GridPoint point;
  linkmodel::LinkChain chain;
  double entropy_rate = 0.0;
  double marginal_entropy = 0.0;
  linkmodel::MutualInformation mi;
  std::optional<double> r_mi;  // empty when the ratio is undefined
  std::optional<McOverlay> mc;
};

/// Monte Carlo settings of the i-th grid point: the configured run with the
/// seed offset by i so points use distinct streams.
montecarlo::McConfig point_mc_config(const montecarlo::McConfig& base, std::size_t index);

PointResult evaluate_point(const GridPoint& point, const config::ExperimentConfig& config,
                           const std::optional<montecarlo::McConfig>& mc);

/// Evaluates every grid point on `jobs` workers. Results are in grid order
/// whatever the completion order. A NonConvergenceError from any point is
/// rethrown after all workers stop. Undefined ratios are reported on `warn`.
std::vector<PointResult> run_sweep(const config::ExperimentConfig& config, unsigned jobs, bool with_mc,
                                   std::ostream* warn = nullptr);

enum class Table { MutualInfo, EntropyVsDt, EntropyVsD, EntropyVsTau };

/// CSV for one of the four sweeps. With Monte Carlo results present,
/// `<metric>_mc,<metric>_mc_se` columns are appended.
void write_csv(std::ostream& os, Table table, const std::vector<PointResult>& results);

//------------------------------------------------------------------------------
// Validation

enum class Status { Ok, Fail, Undefined, Insufficient, Degenerate, Unresolved };
std::string to_string(Status s);

struct ValidationRow {
  GridPoint point;
  std::string quantity;  // p00, p01, p10, p11, steady_on, entropy_rate, r_mi
  double analytical = 0.0;
  double mc = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  Status status = Status::Ok;
};

inline constexpr double kMaxAbsZ = 3.0;
inline constexpr double kMaxEntropyGapBits = 0.02;
// Below this I(L3; L1, L2) the plug-in ratio is dominated by its O(1/N)
// bias and the R_MI comparison is reported as unresolved.
inline constexpr double kMinResolvableInformationBits = 1e-3;

/// Rows for p_ba = P(next = a | prev = b), the on-state probability, the
/// entropy rate and R_MI at one evaluated point (which must carry MC data).
std::vector<ValidationRow> validation_rows(const PointResult& result);

bool passed(const std::vector<ValidationRow>& rows);

/// CSV `delta_t,tau,sqrt_d,quantity,analytical,mc,std_err,z,status`.
void write_validation_csv(std::ostream& os, const std::vector<ValidationRow>& rows);

}  // namespace linkstab::experiments
