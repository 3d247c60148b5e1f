#include "linkstab/jointdist.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "linkstab/errors.hpp"

namespace linkstab::jointdist {

using numerics::kNegInf;

LagCovariance build_covariance(double dt, const mobility::OUParams& params) {
  params.validate();
  LagCovariance c;
  c.phi = mobility::ar1_coeff(dt, params.tau);
  if (c.phi > 1.0 - 1e-9)
    throw IllConditionedError("build_covariance: phi = " + std::to_string(c.phi) +
                              " leaves the lag covariance near singular");
  c.scale = params.diffusion() * params.tau;
  const double p1 = c.phi;
  const double p2 = c.phi * c.phi;
  Eigen::Matrix3d corr;
  corr << 1.0, p1, p2,  //
      p1, 1.0, p1,      //
      p2, p1, 1.0;
  c.sigma = c.scale * corr;
  c.w = c.sigma.inverse();
  c.determinant = c.sigma.determinant();
  c.w13_residual = std::abs(c.w(0, 2)) / c.w.cwiseAbs().maxCoeff();
  return c;
}

BesselWeights bessel_weights(const Eigen::Matrix3d& w) {
  BesselWeights b;
  b.w1 = w(0, 0) + w(0, 1);
  b.w2 = w(1, 1) + w(1, 2) + w(0, 1);
  b.w3 = w(2, 2) + w(1, 2);
  b.w4 = b.w1 + b.w2 + b.w3;
  return b;
}

namespace {

void check_params(const TrivariateParams& p) {
  if (!(p.beta >= 0.0)) throw DomainError("TrivariateParams: beta must be >= 0");
  p.trunc.validate();
  if (!(p.cov.w13_residual <= 1e-12))
    throw DomainError("trivariate density requires a tridiagonal inverse covariance");
}

// Sign of I_n(z): I_n(-z) = (-1)^n I_n(z).
int bessel_sign(double z, int n) { return (z < 0.0 && (n & 1)) ? -1 : 1; }

}  // namespace

double trivariate_pdf(double r1, double r2, double r3, const TrivariateParams& p) {
  if (!(r1 >= 0.0 && r2 >= 0.0 && r3 >= 0.0)) throw DomainError("trivariate_pdf: r must be >= 0");
  check_params(p);
  if (r1 == 0.0 || r2 == 0.0 || r3 == 0.0) return 0.0;

  const auto& w = p.cov.w;
  const BesselWeights bw = bessel_weights(w);
  const double beta = p.beta;
  const double log_prefactor =
      std::log(r1) + std::log(r2) + std::log(r3) - std::log(p.cov.determinant) -
      0.5 * (w(0, 0) * r1 * r1 + w(1, 1) * r2 * r2 + w(2, 2) * r3 * r3 + beta * beta * bw.w4);

  const int max_q = p.trunc.max_q;
  const int max_p = p.trunc.max_p;
  const double z23 = w(2, 1) * r2 * r3;
  const double z3 = bw.w3 * beta * r3;
  const double z1 = bw.w1 * beta * r1;
  const double z12 = w(0, 1) * r1 * r2;
  const double z2 = bw.w2 * beta * r2;

  std::vector<double> l23(max_q + 1), l3(max_q + 1), l1(max_p + 1), l12(max_p + 1),
      l2(max_p + max_q + 1);
  numerics::log_bessel_i_sequence(std::abs(z23), l23);
  numerics::log_bessel_i_sequence(std::abs(z3), l3);
  numerics::log_bessel_i_sequence(std::abs(z1), l1);
  numerics::log_bessel_i_sequence(std::abs(z12), l12);
  numerics::log_bessel_i_sequence(std::abs(z2), l2);

  const double log_tol = std::log(p.trunc.term_rel_tol);
  const int quiet_needed = p.trunc.quiet_run;

  numerics::SignedLogAccumulator total;
  int quiet_q = 0;
  bool settled_q = false;
  double last_q_term = kNegInf;
  for (int q = 0; q <= max_q; ++q) {
    const double log_q_factor = (q == 0 ? 0.0 : std::log(2.0)) + l23[q] + l3[q];
    if (log_q_factor == kNegInf) {
      last_q_term = kNegInf;
      if (++quiet_q >= quiet_needed) {
        settled_q = true;
        break;
      }
      continue;
    }

    numerics::SignedLogAccumulator inner;
    int quiet_p = 0;
    bool settled_p = false;
    double last_p_term = kNegInf;
    for (int m = 0; m <= max_p; ++m) {
      double largest = kNegInf;
      for (int side = 0; side < (m == 0 ? 1 : 2); ++side) {
        const int p_index = side == 0 ? m : -m;
        const int n = std::abs(p_index + q);
        const double mag = l1[m] + l12[m] + l2[n];
        const int sign = (((q + p_index) & 1) ? -1 : 1) * bessel_sign(z1, m) *
                         bessel_sign(z12, m) * bessel_sign(z2, n);
        inner.add(mag, sign);
        largest = std::max(largest, mag);
      }
      last_p_term = largest;
      if (largest == kNegInf || largest < inner.log_scale() + log_tol) {
        if (++quiet_p >= quiet_needed) {
          settled_p = true;
          break;
        }
      } else {
        quiet_p = 0;
      }
    }
    if (!settled_p && last_p_term >= inner.log_scale() + log_tol)
      throw NonConvergenceError("trivariate_pdf: p-series did not settle within max_p terms");

    const auto s = inner.value();
    const double mag = log_q_factor + s.log_magnitude;
    total.add(mag, s.sign * bessel_sign(z23, q) * bessel_sign(z3, q));
    last_q_term = mag;
    if (s.sign == 0 || mag < total.log_scale() + log_tol) {
      if (++quiet_q >= quiet_needed) {
        settled_q = true;
        break;
      }
    } else {
      quiet_q = 0;
    }
  }
  if (!settled_q && last_q_term >= total.log_scale() + log_tol)
    throw NonConvergenceError("trivariate_pdf: q-series did not settle within max_q terms");

  const auto sum = total.value();
  if (sum.sign == 0) return 0.0;
  return sum.sign * std::exp(log_prefactor + sum.log_magnitude);
}

numerics::Interval radial_support(const TrivariateParams& p, const numerics::QuadratureSpec& quad) {
  const double sigma = std::sqrt(p.cov.scale);
  const double hi = numerics::truncated_upper(p.beta, sigma, quad);
  const double lo = std::max(0.0, p.beta - quad.tail_cutoff_sigmas * sigma);
  return {lo, hi, {}};
}

double marginalize_r3(double r1, double r2, const TrivariateParams& p,
                      const numerics::QuadratureSpec& quad) {
  check_params(p);
  const numerics::Interval support = radial_support(p, quad);
  const auto f = [&](std::span<const double> r) { return trivariate_pdf(r1, r2, r[0], p); };
  // Relative tolerance: tail values can be many orders below 1, so the
  // absolute test inside integrate() is switched off and applied here.
  const auto r = numerics::integrate(f, std::span(&support, 1), quad, std::numeric_limits<double>::infinity());
  if (r.error_estimate > 1e-6 * std::abs(r.value) && r.error_estimate > 1e-300)
    throw NonConvergenceError("marginalize_r3: refinement levels differ by more than 1e-6 relative");
  return r.value;
}

//------------------------------------------------------------------------------
// Region box masses
//
// Expanding exp(z cos(angle)) in Bessel functions and integrating the three
// angles leaves, with a12 = -w12 r1 r2, a23 = -w23 r2 r3 and b_i = beta w_i r_i,
//
//   f = r1 r2 r3 / |Sigma| exp(-u'Wu / 2)
//       * sum_{q>=0} eps_q Ih_q(a23) Ih_q(b3) sum_{p in Z} Ih_p(a12) Ih_p(b1) Ih_{p+q}(b2)
//
// where u = r - beta and Ih_n(z) = I_n(z) e^{-z} <= 1. Completing the square
// in u1 and u3 around u2 leaves every exponential factor <= 1, so the sum can
// be carried in linear arithmetic, and for fixed r2 the r1 and r3 integrals
// separate into per-order moments.

namespace {

struct GridNode {
  double r;
  double w;
  int region;  // 1: [lo, r0], 0: (r0, hi]
};

std::vector<GridNode> radial_grid(const numerics::Interval& support, double r0, int nodes, int panels) {
  std::vector<GridNode> grid;
  const double split = std::clamp(r0, support.lo, support.hi);
  if (split > support.lo)
    for (const auto& n : numerics::composite_rule({support.lo, split, {}}, nodes, panels))
      grid.push_back({n.x, n.w, 1});
  if (support.hi > split)
    for (const auto& n : numerics::composite_rule({split, support.hi, {}}, nodes, panels))
      grid.push_back({n.x, n.w, 0});
  return grid;
}

struct GridMasses {
  double mass[2][2][2] = {};
  double truncation = 0.0;
};

// Per-order moments over the outer coordinate (r1 or r3) for a fixed r2:
// out[region][n] = sum_i w_i r_i exp(-diag/2 (u_i + ratio u2)^2) Ih_n(-off r_i r2) Ih_n(b_i)
void outer_moments(const std::vector<GridNode>& grid, const std::vector<double>& b_table, int orders,
                   double diag, double off, double r2, double u2, double beta,
                   std::vector<double>& bessel_buf, std::array<std::vector<double>, 2>& out) {
  for (auto& v : out) std::fill(v.begin(), v.end(), 0.0);
  const double ratio = off / diag;
  const std::size_t stride = static_cast<std::size_t>(orders) + 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double shifted = (grid[i].r - beta) + ratio * u2;
    const double expo = -0.5 * diag * shifted * shifted;
    if (expo < -700.0) continue;
    const double g = grid[i].w * grid[i].r * std::exp(expo);
    numerics::scaled_bessel_i_sequence(-off * grid[i].r * r2, std::span(bessel_buf.data(), stride));
    const double* b = &b_table[i * stride];
    auto& dst = out[grid[i].region];
    for (std::size_t n = 0; n < stride; ++n) dst[n] += g * bessel_buf[n] * b[n];
  }
}

GridMasses grid_masses(const TrivariateParams& p, const numerics::Interval& support, double r0,
                       int nodes, int panels) {
  const auto& W = p.cov.w;
  const BesselWeights bw = bessel_weights(W);
  const double beta = p.beta;
  const int P = p.trunc.max_p;
  const int Q = p.trunc.max_q;
  const auto grid = radial_grid(support, r0, nodes, panels);
  const std::size_t n = grid.size();

  // Per-node tables of Ih_k(b_i).
  std::vector<double> b1(n * (P + 1)), b3(n * (Q + 1)), b2(n * (P + Q + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid[i].r;
    numerics::scaled_bessel_i_sequence(bw.w1 * beta * r, std::span(&b1[i * (P + 1)], P + 1));
    numerics::scaled_bessel_i_sequence(bw.w3 * beta * r, std::span(&b3[i * (Q + 1)], Q + 1));
    numerics::scaled_bessel_i_sequence(bw.w2 * beta * r, std::span(&b2[i * (P + Q + 1)], P + Q + 1));
  }

  const double schur = W(1, 1) - W(0, 1) * W(0, 1) / W(0, 0) - W(1, 2) * W(1, 2) / W(2, 2);
  // The inverse of a symmetric Toeplitz matrix is persymmetric up to
  // rounding, in which case the r3 moments equal the r1 moments.
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-13 * std::max(std::abs(a), std::abs(b));
  };
  const bool persymmetric = P == Q && close(W(0, 0), W(2, 2)) && close(W(0, 1), W(1, 2)) &&
                            close(bw.w1, bw.w3);

  std::vector<double> bessel_buf(std::max(P, Q) + 1);
  std::array<std::vector<double>, 2> a_mom{std::vector<double>(P + 1), std::vector<double>(P + 1)};
  std::array<std::vector<double>, 2> c_mom{std::vector<double>(Q + 1), std::vector<double>(Q + 1)};
  std::array<std::vector<double>, 2> inner{std::vector<double>(Q + 1), std::vector<double>(Q + 1)};

  GridMasses out;
  for (std::size_t j = 0; j < n; ++j) {
    const double r2 = grid[j].r;
    const double u2 = r2 - beta;
    const double expo = -0.5 * schur * u2 * u2;
    if (expo < -700.0) continue;
    const double base = grid[j].w * r2 * std::exp(expo) / p.cov.determinant;

    outer_moments(grid, b1, P, W(0, 0), W(0, 1), r2, u2, beta, bessel_buf, a_mom);
    if (persymmetric)
      c_mom = a_mom;
    else
      outer_moments(grid, b3, Q, W(2, 2), W(1, 2), r2, u2, beta, bessel_buf, c_mom);

    const double* ib2 = &b2[j * (P + Q + 1)];
    double trunc_tail = 0.0;
    for (int c = 0; c < 2; ++c) {
      for (int q = 0; q <= Q; ++q) {
        double t = 0.0;
        for (int pp = -P; pp <= P; ++pp) t += a_mom[c][std::abs(pp)] * ib2[std::abs(pp + q)];
        inner[c][q] = t;
      }
    }
    for (int c = 0; c < 2; ++c) {
      for (int a = 0; a < 2; ++a) {
        double s = 0.0;
        double edge = 0.0;
        for (int q = 0; q <= Q; ++q) {
          const double eps = q == 0 ? 1.0 : 2.0;
          s += eps * c_mom[a][q] * inner[c][q];
          edge += eps * c_mom[a][q] * a_mom[c][P] * (ib2[P + q] + ib2[std::abs(q - P)]);
        }
        edge += 2.0 * c_mom[a][Q] * inner[c][Q];
        out.mass[c][grid[j].region][a] += base * s;
        trunc_tail += base * edge;
      }
    }
    out.truncation += trunc_tail;
  }
  return out;
}

}  // namespace

BoxMasses region_box_masses(const TrivariateParams& p, double r0, const numerics::QuadratureSpec& quad) {
  check_params(p);
  quad.validate();
  if (!(r0 > 0.0)) throw DomainError("region_box_masses: r0 must be > 0");
  const auto& W = p.cov.w;
  const BesselWeights bw = bessel_weights(W);
  if (W(0, 1) > 0.0 || W(1, 2) > 0.0 || bw.w1 < 0.0 || bw.w2 < 0.0 || bw.w3 < 0.0)
    throw DomainError("region_box_masses: requires positively correlated lags");

  const numerics::Interval support = radial_support(p, quad);
  const GridMasses fine = grid_masses(p, support, r0, quad.nodes_per_panel, quad.panels_per_dim);
  const GridMasses coarse =
      grid_masses(p, support, r0, std::max(2, quad.nodes_per_panel / 2), quad.panels_per_dim);

  double total = 0.0;
  for (const auto& plane : fine.mass)
    for (const auto& row : plane)
      for (double v : row) total += v;
  if (fine.truncation > p.trunc.term_rel_tol * std::max(total, 1e-300) * 1e3)
    throw NonConvergenceError("region_box_masses: Bessel series not settled within truncation limits");

  BoxMasses out;
  double diff = 0.0;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        out.mass[c][b][a] = fine.mass[c][b][a];
        diff = std::max(diff, std::abs(fine.mass[c][b][a] - coarse.mass[c][b][a]));
      }

  // Same rule as numerics::integrate: refinement levels may differ by at
  // most 100 times the 1e-8 working tolerance.
  if (diff > 1e-6)
    throw NonConvergenceError("region_box_masses: refinement levels differ by " + std::to_string(diff) +
                              "; increase panels_per_dim or nodes_per_panel");

  const double sigma = std::sqrt(p.cov.scale);
  const double above = numerics::marcum_q1(p.beta / sigma, support.hi / sigma);
  const double below = support.lo > 0.0 ? 1.0 - numerics::marcum_q1(p.beta / sigma, support.lo / sigma) : 0.0;
  out.tail_bound = 3.0 * (above + below);
  out.error_estimate = diff + out.tail_bound + fine.truncation;
  return out;
}

}  // namespace linkstab::jointdist
