#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "linkstab/distance.hpp"
#include "linkstab/errors.hpp"
#include "linkstab/mobility.hpp"

using namespace linkstab;
using namespace linkstab::mobility;

namespace {

struct SampleStats {
  double mean = 0.0;
  double var = 0.0;
  std::size_t n = 0;

  double mean_se() const { return std::sqrt(var / n); }
  // Standard error of the sample variance for Gaussian data.
  double var_se() const { return var * std::sqrt(2.0 / (n - 1)); }
};

SampleStats stats(const std::vector<double>& v) {
  SampleStats s;
  s.n = v.size();
  for (double x : v) s.mean += x;
  s.mean /= s.n;
  for (double x : v) s.var += (x - s.mean) * (x - s.mean);
  s.var /= (s.n - 1);
  return s;
}

OUParams base_params() { return OUParams{1.0, 100.0, 0.0, 0.0}; }

}  // namespace

TEST(OuMoments, Examples) {
  OUParams p = base_params();
  p.mu_x = 3.0;
  const Moments m0 = ou_moments(0.0, 7.0, p, Axis::X);
  EXPECT_EQ(m0.mean, 7.0);
  EXPECT_EQ(m0.variance, 0.0);

  const Moments inf = ou_moments(100.0, 7.0, p, Axis::X);
  EXPECT_NEAR(inf.mean, 3.0, 1e-12 * 3.0);
  EXPECT_NEAR(inf.variance, 5000.0, 1e-12 * 5000.0);

  const Moments one = ou_moments(1.0, 0.0, base_params(), Axis::X);
  EXPECT_DOUBLE_EQ(one.variance, 5000.0 * (1.0 - std::exp(-2.0)));
  EXPECT_DOUBLE_EQ(one.mean, 0.0);
}

TEST(OuMoments, SimulatedPathsMatch) {
  const OUParams p = base_params();
  Xoshiro256 rng(11, 0);
  std::vector<double> s(1'000'000);
  for (auto& v : s) v = step(0.0, p, 1.0, rng.normal(), Axis::X);
  const SampleStats st = stats(s);
  const Moments m = ou_moments(1.0, 0.0, p, Axis::X);
  EXPECT_LE(std::abs(st.mean - m.mean), 3.0 * st.mean_se());
  EXPECT_LE(std::abs(st.var - m.variance), 3.0 * st.var_se());
}

TEST(OuMoments, DomainErrors) {
  EXPECT_THROW(ou_moments(-1.0, 0.0, base_params(), Axis::X), DomainError);
  EXPECT_THROW(ou_moments(1.0, 0.0, OUParams{0.0, 1.0, 0.0, 0.0}, Axis::X), DomainError);
}

TEST(Ar1Coeff, Examples) {
  EXPECT_DOUBLE_EQ(ar1_coeff(1.0, 1.0), std::exp(-1.0));
  EXPECT_NEAR(ar1_coeff(1e-12, 1.0), 1.0, 1e-11);
  EXPECT_LT(ar1_coeff(100.0, 1.0), 1e-43);
  EXPECT_GT(ar1_coeff(100.0, 1.0), 0.0);
  EXPECT_THROW(ar1_coeff(0.0, 1.0), DomainError);
  EXPECT_THROW(ar1_coeff(1.0, 0.0), DomainError);
  EXPECT_THROW(ar1_coeff(-1.0, 1.0), DomainError);
}

TEST(Step, Examples) {
  OUParams p = base_params();
  p.mu_y = -4.0;
  EXPECT_DOUBLE_EQ(step(-4.0, p, 0.7, 0.0, Axis::Y), -4.0);
  // Tiny dt: the drift barely moves and the noise has std sqrt(D tau / 2 (1 - phi^2)).
  const double s = step(123.0, p, 1e-9, 0.8, Axis::X);
  EXPECT_NEAR(s, 123.0 * std::exp(-1e-9) + 0.8 * std::sqrt(-5000.0 * std::expm1(-2e-9)), 1e-9);
}

TEST(Step, IteratedStepIsExactForAnyDt) {
  OUParams p = base_params();
  p.mu_x = 20.0;
  for (double dt : {0.1, 1.0, 10.0}) {
    const int k = 5;
    Xoshiro256 rng(99, static_cast<std::uint64_t>(dt * 10));
    std::vector<double> s(200'000);
    const Ar1Stepper stepper(p, dt, Axis::X);
    for (auto& v : s) {
      double x = -30.0;
      for (int i = 0; i < k; ++i) x = stepper(x, rng.normal());
      v = x;
    }
    const SampleStats st = stats(s);
    const Moments m = ou_moments(k * dt, -30.0, p, Axis::X);
    EXPECT_LE(std::abs(st.mean - m.mean), 3.0 * st.mean_se()) << "dt=" << dt;
    EXPECT_LE(std::abs(st.var - m.variance), 3.0 * st.var_se()) << "dt=" << dt;
  }
}

TEST(SampleStationary, Examples) {
  OUParams tiny{1.0, 1e-9, 2.0, -1.0};
  Xoshiro256 rng(3, 0);
  EXPECT_NEAR(sample_stationary(tiny, rng, Axis::X), 2.0, 1e-7);
  EXPECT_NEAR(sample_stationary(tiny, rng, Axis::Y), -1.0, 1e-7);

  const OUParams p = base_params();
  std::vector<double> s(1'000'000);
  for (auto& v : s) v = sample_stationary(p, rng, Axis::X);
  const SampleStats st = stats(s);
  EXPECT_LE(std::abs(st.var - 5000.0), 3.0 * st.var_se());
  EXPECT_LE(std::abs(st.mean), 3.0 * st.mean_se());
}

TEST(SampleStationary, LagAutocovariance) {
  const OUParams p = base_params();
  const double dt = 0.5;
  const Ar1Stepper stepper(p, dt, Axis::X);
  Xoshiro256 rng(5, 1);
  const std::size_t n = 1'000'000;
  std::vector<double> prod(n);
  for (auto& v : prod) {
    const double a = sample_stationary(p, rng, Axis::X);
    const double b = stepper(a, rng.normal());
    v = a * b;
  }
  const SampleStats st = stats(prod);
  EXPECT_LE(std::abs(st.mean - 5000.0 * std::exp(-dt)), 3.0 * st.mean_se());
}

TEST(SimulateDistance, FrozenNodesStayAtBeta) {
  const PairConfig cfg{OUParams{1.0, 1e-12, 0.0, 0.0}, 10.0};
  const auto r = simulate_distance_sequence(cfg, 1.0, 50, {1, 0});
  ASSERT_EQ(r.size(), 50u);
  for (double v : r) EXPECT_NEAR(v, 10.0, 1e-9);
}

TEST(SimulateDistance, KolmogorovSmirnovAgainstRician) {
  const PairConfig cfg{base_params(), 10.0};
  const std::size_t n = 100'000;
  std::vector<double> r;
  r.reserve(n);
  // One draw per path so the sample is independent.
  for (std::size_t i = 0; i < n; ++i) r.push_back(simulate_distance_sequence(cfg, 1.0, 1, {2024, i})[0]);
  std::sort(r.begin(), r.end());
  const distance::RicianLaw law = distance::stationary_law(10.0, cfg.params);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = distance::rician_cdf(r[i], law);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST(SimulateDistance, DifferenceProcessMomentsAndLagCorrelation) {
  const PairConfig cfg{base_params(), 10.0};
  const double dt = 0.5;
  const double phi = ar1_coeff(dt, 1.0);
  const std::size_t n = 200'000;
  std::vector<double> x0(n), y0(n), x2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PairTrajectory t = simulate_pair(cfg, dt, 3, {77, i});
    x0[i] = t.node2.states[0].x - t.node1.states[0].x;
    y0[i] = t.node2.states[0].y - t.node1.states[0].y;
    x2[i] = t.node2.states[2].x - t.node1.states[2].x;
  }
  const SampleStats sx = stats(x0), sy = stats(y0);
  const double dtau = 1e4;
  EXPECT_LE(std::abs(sx.mean - 10.0), 3.0 * sx.mean_se());
  EXPECT_LE(std::abs(sy.mean), 3.0 * sy.mean_se());
  EXPECT_LE(std::abs(sx.var - dtau), 3.0 * sx.var_se());
  EXPECT_LE(std::abs(sy.var - dtau), 3.0 * sy.var_se());

  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) cov += (x0[i] - 10.0) * (x2[i] - 10.0);
  const double rho = cov / n / dtau;
  // Var[(X0 - beta)(X2 - beta)] / (D tau)^2 = 1 + rho^2 for jointly Gaussian X.
  const double rho_se = std::sqrt((1.0 + phi * phi * phi * phi) / static_cast<double>(n));
  EXPECT_LE(std::abs(rho - phi * phi), 3.0 * rho_se);
}

TEST(SimulateDistance, DeterministicForFixedKey) {
  const PairConfig cfg{base_params(), 10.0};
  const auto a = simulate_distance_sequence(cfg, 0.3, 100, {42, 9});
  const auto b = simulate_distance_sequence(cfg, 0.3, 100, {42, 9});
  const auto c = simulate_distance_sequence(cfg, 0.3, 100, {42, 10});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(SimulateDistance, TransientStartBeginsAtDesiredPositions) {
  const PairConfig cfg{base_params(), 10.0};
  const auto t = simulate_pair(cfg, 1.0, 2, {1, 1}, false);
  EXPECT_EQ(t.distance[0], 10.0);
}

TEST(SimulateDistance, DomainErrors) {
  EXPECT_THROW(simulate_distance_sequence({base_params(), 10.0}, 1.0, 0, {}), DomainError);
  EXPECT_THROW(simulate_distance_sequence({base_params(), -1.0}, 1.0, 3, {}), DomainError);
  EXPECT_THROW(simulate_distance_sequence({base_params(), 10.0}, 0.0, 3, {}), DomainError);
  EXPECT_THROW(simulate_distance_sequence({OUParams{1.0, 0.0, 0.0, 0.0}, 10.0}, 1.0, 3, {}), DomainError);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const auto t = simulate_pair({base_params(), 10.0}, 1.0, 3, {5, 5});
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "step,x1,y1,x2,y2,r");
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Xoshiro, StreamsDifferAndUniformIsOpen) {
  Xoshiro256 a(1, 0), b(1, 1);
  EXPECT_NE(a(), b());
  Xoshiro256 c(1, 2);
  for (int i = 0; i < 100000; ++i) {
    const double u = c.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
