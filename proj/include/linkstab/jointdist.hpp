#pragma once

// Stationary joint law of the distance at three consecutive samples. The
// x (and y) coordinates of the difference process form an AR(1) sequence
// whose lag covariance is Toeplitz with a tridiagonal inverse, which is what
// makes the trivariate Rician density a double Bessel series.

#include <Eigen/Core>

#include "linkstab/mobility.hpp"
#include "linkstab/numerics.hpp"

namespace linkstab::jointdist {

struct LagCovariance {
  double scale = 1.0;  // D tau
  double phi = 0.0;
  Eigen::Matrix3d sigma;
  Eigen::Matrix3d w;          // sigma^{-1}
  double determinant = 1.0;   // |sigma|
  double w13_residual = 0.0;  // |w13| / max |w_uv|
};

/// Covariance of (X_1, X_2, X_3) sampled dt apart. Throws
/// IllConditionedError when phi > 1 - 1e-9.
LagCovariance build_covariance(double dt, const mobility::OUParams& params);

struct TrivariateParams {
  double beta = 0.0;
  LagCovariance cov;
  numerics::SeriesTruncation trunc;
};

// Row sums of W that multiply beta in the Bessel arguments, and their total.
struct BesselWeights {
  double w1, w2, w3, w4;
};
BesselWeights bessel_weights(const Eigen::Matrix3d& w);

/// Joint density of (R_1, R_2, R_3), 1/m^3. Summed term by term in the
/// signed log domain; throws NonConvergenceError if the series has not
/// settled within the truncation limits.
double trivariate_pdf(double r1, double r2, double r3, const TrivariateParams& p);

/// Radial integration range [lo, hi] for the stationary distance law:
/// hi = beta + tail * sqrt(D tau), lo = max(0, beta - tail * sqrt(D tau)).
numerics::Interval radial_support(const TrivariateParams& p, const numerics::QuadratureSpec& quad);

/// Joint density of (R_1, R_2): the trivariate density with r3 integrated out.
double marginalize_r3(double r1, double r2, const TrivariateParams& p,
                      const numerics::QuadratureSpec& quad);

// Probability mass of the 8 boxes I_c x I_b x I_a with I_1 = [lo, r0] and
// I_0 = (r0, hi]. Indexed mass[c][b][a] for (R_1, R_2, R_3).
struct BoxMasses {
  double mass[2][2][2] = {};
  double error_estimate = 0.0;  // refinement difference plus truncated tail
  double tail_bound = 0.0;      // stationary mass outside [lo, hi], union bound
};

/// Box masses of the trivariate density on a tensor Gauss-Legendre grid
/// split at r0. Uses the separable structure of the series (r1 and r3 only
/// couple through r2) so the cost is quadratic in nodes per axis. Throws
/// NonConvergenceError when the series has not settled or when the grid and
/// its half-node companion disagree by more than 1e-6.
BoxMasses region_box_masses(const TrivariateParams& p, double r0, const numerics::QuadratureSpec& quad);

}  // namespace linkstab::jointdist
