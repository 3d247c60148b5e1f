#pragma once

// Special functions, signed log-domain accumulation and tensor-product
// Gauss-Legendre quadrature shared by the analytical modules.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace linkstab::numerics {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

//------------------------------------------------------------------------------
// Series truncation

struct SeriesTruncation {
  int max_q = 60;
  int max_p = 60;
  double term_rel_tol = 1e-12;
  // Consecutive negligible terms required before a sum exits early.
  int quiet_run = 20;

  void validate() const;
};

//------------------------------------------------------------------------------
// Signed log-domain values

struct SignedLogValue {
  double log_magnitude = kNegInf;
  int sign = 0;

  static SignedLogValue zero() { return {}; }
  static SignedLogValue from_linear(double v);
  double to_linear() const;
};

SignedLogValue signed_log_sum(std::span<const SignedLogValue> terms);

// Streaming form of signed_log_sum. Positive and negative parts are kept as
// separate log-sum-exp accumulators and only combined on read, so exact
// cancellation yields sign 0.
class SignedLogAccumulator {
 public:
  void add(const SignedLogValue& term);
  void add(double log_magnitude, int sign) { add(SignedLogValue{log_magnitude, sign}); }
  SignedLogValue value() const;
  // ln of the largest partial magnitude seen so far (either sign).
  double log_scale() const;

 private:
  struct LogSumExp {
    double max = kNegInf;
    double sum = 0.0;  // sum of exp(term - max)
    void add(double log_term);
    double log_value() const;
  };
  LogSumExp pos_;
  LogSumExp neg_;
};

//------------------------------------------------------------------------------
// Modified Bessel functions of the first kind, integer order

/// ln I_n(x) for n >= 0, x >= 0. Returns -inf for I_n(0) with n > 0.
///
/// Power series below x = 30; above, Hankel's asymptotic expansion for
/// orders small relative to sqrt(x) and otherwise the exact ratio
/// I_n/I_0 from Miller's backward recurrence on top of the Hankel I_0.
double log_bessel_i(int order, double x);

/// ln(e^{-x} I_order(x)). Stays accurate where ln I_order(x) - x would cancel.
double log_scaled_bessel_i(int order, double x);

/// Scaled values I_n(x) e^{-x} for n = 0..out.size()-1 via normalized
/// backward recurrence. Entries may underflow to zero for large n.
void scaled_bessel_i_sequence(double x, std::span<double> out);

/// ln I_n(x) for n = 0..out.size()-1 without underflow.
void log_bessel_i_sequence(double x, std::span<double> out);

/// Marcum Q-function of order one, Q_1(a, b) = P(Rice(a, 1) > b).
double marcum_q1(double a, double b);

//------------------------------------------------------------------------------
// Quadrature

struct QuadratureSpec {
  int nodes_per_panel = 48;
  int panels_per_dim = 4;
  double tail_cutoff_sigmas = 10.0;

  void validate() const;
};

// Closed interval [lo, hi] with optional interior breakpoints. Each segment
// between consecutive breakpoints is tiled with its own panels so no panel
// straddles a breakpoint.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> breaks;
};

struct QuadratureNode {
  double x;
  double w;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::vector<QuadratureNode> gauss_legendre(int n);

/// Composite rule over an interval: breakpoints split it into segments,
/// each tiled by `panels` equal panels of `nodes` Gauss-Legendre points.
std::vector<QuadratureNode> composite_rule(const Interval& interval, int nodes, int panels);

/// Upper limit standing in for +inf on a radial axis whose law has location
/// `center` and per-axis scale `sigma`.
double truncated_upper(double center, double sigma, const QuadratureSpec& spec);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

using ScalarField = std::function<double(std::span<const double>)>;

/// Tensor-product integral of f over the box `bounds` (1 to 3 dimensions).
/// The error estimate is the difference against the same panels with half
/// the nodes. Throws NonConvergenceError when it exceeds 100 * tolerance.
QuadratureResult integrate(const ScalarField& f, std::span<const Interval> bounds,
                           const QuadratureSpec& spec, double tolerance = 1e-8);

}  // namespace linkstab::numerics
