#pragma once

// Simulation oracle for the analytical link model. It only uses the exact
// AR(1) stepper and the link indicator, never the analytical densities.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "linkstab/linkmodel.hpp"
#include "linkstab/mobility.hpp"

namespace linkstab::montecarlo {

struct McConfig {
  std::uint64_t n_samples = 1'000'000;  // transitions in total, over all chains
  std::optional<std::uint64_t> burn_in;  // default: 0 if stationary, else 100 tau / dt
  std::uint64_t seed = 20190401;
  bool stationary_start = true;
  std::uint32_t chains = 1024;
  std::uint32_t bootstrap_resamples = 200;
  unsigned threads = 1;

  std::uint64_t effective_burn_in(double dt, double tau) const;
  void validate() const;
};

struct McEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
};

// Per-chain link-state counts.
struct ChainCounts {
  std::array<std::uint64_t, 2> states{};          // [state]
  std::array<std::uint64_t, 4> transitions{};     // [2 * prev + next]
  std::array<std::uint64_t, 8> triples{};         // [4 * c + 2 * b + a]
};

struct LinkCounts {
  std::vector<ChainCounts> chains;
  ChainCounts total() const;
};

/// Runs config.chains independent chains of ceil(n_samples / chains)
/// transitions each and tallies link states.
LinkCounts simulate_link_counts(const McConfig& config, double dt, const mobility::OUParams& params,
                                double beta, const linkmodel::ConnectionModel& model);

// Rows conditioned on a state seen fewer than 100 times are insufficient:
// their estimates are NaN and require_sufficient() throws.
struct McTransition {
  McEstimate p[2][2];
  bool sufficient[2] = {true, true};

  void require_sufficient() const;
};

McTransition transition_estimates(const LinkCounts& counts);
std::array<McEstimate, 8> joint3_estimates(const LinkCounts& counts);
McEstimate steady_state_estimate(const LinkCounts& counts);
McEstimate entropy_rate_estimate(const LinkCounts& counts, const McConfig& config);
// Empty when the plug-in denominator I(L3; L1, L2) is zero.
std::optional<McEstimate> mi_ratio_estimate(const LinkCounts& counts, const McConfig& config);

McTransition empirical_transition(const McConfig& config, double dt, const mobility::OUParams& params,
                                  double beta, const linkmodel::ConnectionModel& model);
std::array<McEstimate, 8> empirical_joint3(const McConfig& config, double dt,
                                           const mobility::OUParams& params, double beta,
                                           const linkmodel::ConnectionModel& model);
McEstimate empirical_entropy_rate(const McConfig& config, double dt, const mobility::OUParams& params,
                                  double beta, const linkmodel::ConnectionModel& model);

/// (analytical - value) / std_err. Throws DomainError on a degenerate
/// (zero standard error) estimate.
double compare(double analytical, const McEstimate& empirical);

/// CSV `state_prev,state_next,count` of pooled transitions.
void write_counts_csv(std::ostream& os, const LinkCounts& counts);

}  // namespace linkstab::montecarlo
