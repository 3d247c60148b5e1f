#pragma once

// Ornstein-Uhlenbeck mobility: each coordinate of each node reverts to its
// desired position with relaxation time tau and diffusion coefficient D.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "linkstab/rng.hpp"

namespace linkstab::mobility {

enum class Axis { X, Y };

struct OUParams {
  double tau = 1.0;     // s
  double sqrt_d = 100.0;  // m / sqrt(s)
  double mu_x = 0.0;    // m
  double mu_y = 0.0;    // m

  double diffusion() const { return sqrt_d * sqrt_d; }
  double mean(Axis axis) const { return axis == Axis::X ? mu_x : mu_y; }
  // Stationary per-coordinate variance D tau / 2.
  double stationary_variance() const { return 0.5 * diffusion() * tau; }
  void validate() const;
};

// Two nodes sharing one set of OU parameters; node 1 reverts to (0, 0) and
// node 2 to (beta, 0).
struct PairConfig {
  OUParams params;
  double beta = 10.0;  // m

  OUParams node(int index) const;
  void validate() const;
};

struct NodeState {
  double x = 0.0;
  double y = 0.0;
};

struct Trajectory {
  double dt = 1.0;
  std::vector<NodeState> states;
};

struct Moments {
  double mean;
  double variance;
};

Moments ou_moments(double t, double s0, const OUParams& params, Axis axis);

/// AR(1) coefficient exp(-dt / tau) of the sampled process.
double ar1_coeff(double dt, double tau);

/// Exact transition of one coordinate over dt given a standard normal draw.
double step(double s_prev, const OUParams& params, double dt, double noise, Axis axis);

// Precomputed form of `step` for repeated use with fixed (params, dt, axis).
struct Ar1Stepper {
  double phi;
  double drift;     // mu (1 - phi)
  double noise_sd;  // sqrt(D tau (1 - phi^2) / 2)

  Ar1Stepper(const OUParams& params, double dt, Axis axis);
  double operator()(double s_prev, double noise) const { return phi * s_prev + drift + noise_sd * noise; }
};

double sample_stationary(const OUParams& params, Xoshiro256& rng, Axis axis);

// Identifies the random streams of one simulated path: coordinate streams
// are (seed, 4 * path + slot) for slot in {x1, y1, x2, y2}.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
};

struct PairTrajectory {
  Trajectory node1;
  Trajectory node2;
  std::vector<double> distance;
};

/// k samples of both nodes at spacing dt. With stationary_start each
/// coordinate starts from its stationary law, otherwise at its desired
/// position; the first sample is the start state.
PairTrajectory simulate_pair(const PairConfig& config, double dt, std::size_t k, StreamKey key,
                             bool stationary_start = true);

std::vector<double> simulate_distance_sequence(const PairConfig& config, double dt, std::size_t k,
                                               StreamKey key, bool stationary_start = true);

/// CSV with header `step,x1,y1,x2,y2,r`.
void write_trajectory_csv(std::ostream& os, const PairTrajectory& trajectory);

}  // namespace linkstab::mobility
