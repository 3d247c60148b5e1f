#include "linkstab/mobility.hpp"

#include <cmath>
#include <ostream>

#include "linkstab/csv.hpp"
#include "linkstab/errors.hpp"

namespace linkstab::mobility {

void OUParams::validate() const {
  if (!(tau > 0.0)) throw DomainError("OUParams: tau must be > 0");
  if (!(sqrt_d > 0.0)) throw DomainError("OUParams: sqrt_d must be > 0");
  if (!std::isfinite(mu_x) || !std::isfinite(mu_y)) throw DomainError("OUParams: non-finite mean");
}

OUParams PairConfig::node(int index) const {
  OUParams p = params;
  p.mu_x = index == 1 ? 0.0 : beta;
  p.mu_y = 0.0;
  return p;
}

void PairConfig::validate() const {
  params.validate();
  if (!(beta >= 0.0)) throw DomainError("PairConfig: beta must be >= 0");
}

Moments ou_moments(double t, double s0, const OUParams& params, Axis axis) {
  if (!(t >= 0.0)) throw DomainError("ou_moments: t must be >= 0");
  params.validate();
  const double mu = params.mean(axis);
  const double decay = std::exp(-t / params.tau);
  return {mu + (s0 - mu) * decay,
          params.stationary_variance() * -std::expm1(-2.0 * t / params.tau)};
}

double ar1_coeff(double dt, double tau) {
  if (!(dt > 0.0) || !(tau > 0.0)) throw DomainError("ar1_coeff: dt and tau must be > 0");
  return std::exp(-dt / tau);
}

Ar1Stepper::Ar1Stepper(const OUParams& params, double dt, Axis axis) {
  params.validate();
  phi = ar1_coeff(dt, params.tau);
  drift = params.mean(axis) * (1.0 - phi);
  // 1 - phi^2 via expm1 keeps precision when dt << tau.
  noise_sd = std::sqrt(params.stationary_variance() * -std::expm1(-2.0 * dt / params.tau));
}

double step(double s_prev, const OUParams& params, double dt, double noise, Axis axis) {
  return Ar1Stepper(params, dt, axis)(s_prev, noise);
}

double sample_stationary(const OUParams& params, Xoshiro256& rng, Axis axis) {
  return params.mean(axis) + std::sqrt(params.stationary_variance()) * rng.normal();
}

PairTrajectory simulate_pair(const PairConfig& config, double dt, std::size_t k, StreamKey key,
                             bool stationary_start) {
  config.validate();
  if (k < 1) throw DomainError("simulate_pair: k must be >= 1");
  if (!(dt > 0.0)) throw DomainError("simulate_pair: dt must be > 0");

  const OUParams n1 = config.node(1);
  const OUParams n2 = config.node(2);
  const Ar1Stepper x1_step(n1, dt, Axis::X), y1_step(n1, dt, Axis::Y);
  const Ar1Stepper x2_step(n2, dt, Axis::X), y2_step(n2, dt, Axis::Y);
  Xoshiro256 gx1(key.seed, 4 * key.path + 0), gy1(key.seed, 4 * key.path + 1);
  Xoshiro256 gx2(key.seed, 4 * key.path + 2), gy2(key.seed, 4 * key.path + 3);

  NodeState a{n1.mu_x, n1.mu_y};
  NodeState b{n2.mu_x, n2.mu_y};
  if (stationary_start) {
    a = {sample_stationary(n1, gx1, Axis::X), sample_stationary(n1, gy1, Axis::Y)};
    b = {sample_stationary(n2, gx2, Axis::X), sample_stationary(n2, gy2, Axis::Y)};
  }

  PairTrajectory out;
  out.node1.dt = out.node2.dt = dt;
  out.node1.states.reserve(k);
  out.node2.states.reserve(k);
  out.distance.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (i > 0) {
      a = {x1_step(a.x, gx1.normal()), y1_step(a.y, gy1.normal())};
      b = {x2_step(b.x, gx2.normal()), y2_step(b.y, gy2.normal())};
    }
    out.node1.states.push_back(a);
    out.node2.states.push_back(b);
    out.distance.push_back(std::hypot(b.x - a.x, b.y - a.y));
  }
  return out;
}

std::vector<double> simulate_distance_sequence(const PairConfig& config, double dt, std::size_t k,
                                               StreamKey key, bool stationary_start) {
  return simulate_pair(config, dt, k, key, stationary_start).distance;
}

void write_trajectory_csv(std::ostream& os, const PairTrajectory& trajectory) {
  os << "step,x1,y1,x2,y2,r\n";
  for (std::size_t i = 0; i < trajectory.distance.size(); ++i) {
    const auto& a = trajectory.node1.states[i];
    const auto& b = trajectory.node2.states[i];
    os << i << ',' << csv::number(a.x) << ',' << csv::number(a.y) << ',' << csv::number(b.x) << ','
       << csv::number(b.y) << ',' << csv::number(trajectory.distance[i]) << '\n';
  }
}

}  // namespace linkstab::mobility
