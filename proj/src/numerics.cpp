#include "linkstab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "linkstab/errors.hpp"

namespace linkstab::numerics {

namespace {

constexpr double kRescaleAbove = 1e200;
constexpr double kRescaleBy = 1e-200;
const double kLogRescale = std::log(kRescaleBy);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double log_bessel_i_series(int n, double x) {
  const double half = 0.5 * x;
  const double q = half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 2000; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + n));
    sum += term;
    if (term < 1e-17 * sum && k + 1 > half) break;
  }
  return n * std::log(half) - std::lgamma(n + 1.0) + std::log(sum);
}

// ln(I_n(x) e^{-x}) from Hankel's expansion; requires 2n^2 <= x, x > 30.
double log_scaled_bessel_i_hankel(int n, double x) {
  const double mu = 4.0 * n * n;
  double term = 1.0;
  double sum = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    const double a = std::abs(term);
    if (a > prev_abs && k > n) break;  // past the smallest term
    sum += term;
    if (a < 1e-17 * std::abs(sum)) break;
    prev_abs = a;
  }
  return -0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

// ln(I_n(x) / I_0(x)) by Miller's backward recurrence.
double log_bessel_ratio_miller(int n, double x) {
  const int start = n + 30 + static_cast<int>(std::ceil(std::sqrt(40.0 * x)));
  double next = 0.0;  // f_{k+1}
  double cur = 1.0;   // f_k
  double scale = 0.0;
  double log_fn = 0.0;
  for (int k = start; k > 0; --k) {
    if (k == n) log_fn = std::log(cur) + scale;
    const double prev = next + (2.0 * k / x) * cur;
    next = cur;
    cur = prev;
    if (cur > kRescaleAbove) {
      cur *= kRescaleBy;
      next *= kRescaleBy;
      scale -= kLogRescale;
    }
  }
  const double log_f0 = std::log(cur) + scale;
  return (n == 0 ? log_f0 : log_fn) - log_f0;
}

// Below this the leading two power-series terms are exact to double precision
// and the backward recurrence would overflow its 2k/x coefficient.
constexpr double kTinyArgument = 1e-8;

double log_bessel_i_tiny(std::size_t n, double x) {
  const double nn = static_cast<double>(n);
  return nn * std::log(0.5 * x) - std::lgamma(nn + 1.0) + std::log1p(0.25 * x * x / (nn + 1.0));
}

int miller_start(std::size_t max_order, double x) {
  return static_cast<int>(max_order) + 30 + static_cast<int>(std::ceil(std::sqrt(40.0 * x)));
}

}  // namespace

//------------------------------------------------------------------------------

void SeriesTruncation::validate() const {
  if (max_q < 1 || max_p < 1)
    throw DomainError("SeriesTruncation: max_q and max_p must be >= 1");
  if (!(term_rel_tol > 0.0 && term_rel_tol < 1.0))
    throw DomainError("SeriesTruncation: term_rel_tol must lie in (0, 1)");
  if (quiet_run < 1) throw DomainError("SeriesTruncation: quiet_run must be >= 1");
}

//------------------------------------------------------------------------------

SignedLogValue SignedLogValue::from_linear(double v) {
  if (v == 0.0) return zero();
  return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

double SignedLogValue::to_linear() const {
  return sign == 0 ? 0.0 : sign * std::exp(log_magnitude);
}

void SignedLogAccumulator::LogSumExp::add(double log_term) {
  if (log_term == kNegInf) return;
  if (log_term <= max) {
    sum += std::exp(log_term - max);
  } else {
    sum = sum * std::exp(max - log_term) + 1.0;
    max = log_term;
  }
}

double SignedLogAccumulator::LogSumExp::log_value() const {
  return sum > 0.0 ? max + std::log(sum) : kNegInf;
}

void SignedLogAccumulator::add(const SignedLogValue& term) {
  if (term.sign > 0)
    pos_.add(term.log_magnitude);
  else if (term.sign < 0)
    neg_.add(term.log_magnitude);
}

double SignedLogAccumulator::log_scale() const { return std::max(pos_.max, neg_.max); }

SignedLogValue SignedLogAccumulator::value() const {
  const double lp = pos_.log_value();
  const double ln = neg_.log_value();
  if (lp == ln) return SignedLogValue::zero();
  if (lp > ln) {
    if (ln == kNegInf) return {lp, 1};
    return {lp + std::log1p(-std::exp(ln - lp)), 1};
  }
  if (lp == kNegInf) return {ln, -1};
  return {ln + std::log1p(-std::exp(lp - ln)), -1};
}

SignedLogValue signed_log_sum(std::span<const SignedLogValue> terms) {
  SignedLogAccumulator acc;
  for (const auto& t : terms) acc.add(t);
  return acc.value();
}

//------------------------------------------------------------------------------

double log_bessel_i(int order, double x) {
  if (order < 0) throw DomainError("log_bessel_i: negative order");
  if (!(x >= 0.0)) throw DomainError("log_bessel_i: x must be >= 0");
  if (x == 0.0) return order == 0 ? 0.0 : kNegInf;
  if (std::isinf(x)) return x;
  if (x <= 30.0) return log_bessel_i_series(order, x);
  return x + log_scaled_bessel_i(order, x);
}

double log_scaled_bessel_i(int order, double x) {
  if (order < 0) throw DomainError("log_scaled_bessel_i: negative order");
  if (!(x >= 0.0)) throw DomainError("log_scaled_bessel_i: x must be >= 0");
  if (x <= 30.0) return log_bessel_i(order, x) - x;
  if (std::isinf(x)) return -std::log(x);  // e^{-x} I_n(x) ~ 1 / sqrt(2 pi x)
  if (2.0 * order * order <= x) return log_scaled_bessel_i_hankel(order, x);
  return log_scaled_bessel_i_hankel(0, x) + log_bessel_ratio_miller(order, x);
}

void scaled_bessel_i_sequence(double x, std::span<double> out) {
  if (out.empty()) return;
  if (!(x >= 0.0)) throw DomainError("scaled_bessel_i_sequence: x must be >= 0");
  std::fill(out.begin(), out.end(), 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return;
  }
  if (x < kTinyArgument) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = std::exp(log_bessel_i_tiny(n, x) - x);
    return;
  }
  const std::size_t nmax = out.size() - 1;
  double next = 0.0;
  double cur = 1e-280;
  double sum = 0.0;  // f_0 + 2 sum_{k>=1} f_k, accumulated as k descends
  for (int k = miller_start(nmax, x); k > 0; --k) {
    if (static_cast<std::size_t>(k) <= nmax) out[k] = cur;
    sum += 2.0 * cur;
    const double prev = next + (2.0 * k / x) * cur;
    next = cur;
    cur = prev;
    if (cur > kRescaleAbove) {
      cur *= kRescaleBy;
      next *= kRescaleBy;
      sum *= kRescaleBy;
      for (std::size_t j = static_cast<std::size_t>(k); j <= nmax; ++j) out[j] *= kRescaleBy;
    }
  }
  out[0] = cur;
  sum += cur;
  for (auto& v : out) v /= sum;
}

void log_bessel_i_sequence(double x, std::span<double> out) {
  if (out.empty()) return;
  if (!(x >= 0.0)) throw DomainError("log_bessel_i_sequence: x must be >= 0");
  if (x == 0.0) {
    std::fill(out.begin(), out.end(), kNegInf);
    out[0] = 0.0;
    return;
  }
  if (x < kTinyArgument) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = log_bessel_i_tiny(n, x);
    return;
  }
  const std::size_t nmax = out.size() - 1;
  double next = 0.0;
  double cur = 1.0;
  double scale = 0.0;
  double sum = 0.0;
  for (int k = miller_start(nmax, x); k > 0; --k) {
    if (static_cast<std::size_t>(k) <= nmax) out[k] = std::log(cur) + scale;
    sum += 2.0 * cur;
    const double prev = next + (2.0 * k / x) * cur;
    next = cur;
    cur = prev;
    if (cur > kRescaleAbove) {
      cur *= kRescaleBy;
      next *= kRescaleBy;
      sum *= kRescaleBy;
      scale -= kLogRescale;
    }
  }
  out[0] = std::log(cur) + scale;
  sum += cur;
  // e^x = I_0 + 2 sum I_k fixes the normalization.
  const double log_norm = std::log(sum) + scale - x;
  for (auto& v : out) v -= log_norm;
}

double marcum_q1(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q1: arguments must be >= 0");
  if (b == 0.0) return 1.0;
  if (a == 0.0) return std::exp(-0.5 * b * b);
  const double z = a * b;
  if (a == b) {
    double i0[1];
    scaled_bessel_i_sequence(z, i0);
    return std::clamp(0.5 * (1.0 + i0[0]), 0.0, 1.0);
  }
  const double ratio = a < b ? a / b : b / a;
  // Terms decay at least like ratio^k and like exp(-k^2 / 2z).
  const double by_ratio = ratio < 1.0 ? 40.0 / -std::log(ratio) : 1e9;
  const double by_bessel = std::sqrt(80.0 * z) + 10.0;
  const auto kmax = static_cast<std::size_t>(std::ceil(std::min(by_ratio, by_bessel))) + 4;
  std::vector<double> ik(kmax + 1);
  scaled_bessel_i_sequence(z, ik);

  CompensatedSum series;
  double power = 1.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    if (k > 0 || a < b) series.add(power * ik[k]);
    power *= ratio;
  }
  const double diff = a - b;
  const double tail = std::exp(-0.5 * diff * diff) * series.value();
  return std::clamp(a < b ? tail : 1.0 - tail, 0.0, 1.0);
}

//------------------------------------------------------------------------------

void QuadratureSpec::validate() const {
  if (nodes_per_panel < 2) throw DomainError("QuadratureSpec: nodes_per_panel must be >= 2");
  if (panels_per_dim < 1) throw DomainError("QuadratureSpec: panels_per_dim must be >= 1");
  if (!(tail_cutoff_sigmas > 0.0))
    throw DomainError("QuadratureSpec: tail_cutoff_sigmas must be > 0");
}

std::vector<QuadratureNode> gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  std::vector<QuadratureNode> rule(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule[i] = {-z, w};
    rule[n - 1 - i] = {z, w};
  }
  return rule;
}

std::vector<QuadratureNode> composite_rule(const Interval& interval, int nodes, int panels) {
  if (!(interval.hi >= interval.lo)) throw DomainError("composite_rule: interval is not ordered");
  std::vector<double> cuts{interval.lo};
  std::vector<double> inner;
  for (double b : interval.breaks)
    if (b > interval.lo && b < interval.hi) inner.push_back(b);
  std::sort(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(interval.hi);

  const auto base = gauss_legendre(nodes);
  std::vector<QuadratureNode> out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s];
    const double b = cuts[s + 1];
    if (!(b > a)) continue;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double pa = a + p * width;
      const double pb = p + 1 == panels ? b : pa + width;
      const double mid = 0.5 * (pa + pb);
      const double half = 0.5 * (pb - pa);
      for (const auto& n : base) out.push_back({mid + half * n.x, half * n.w});
    }
  }
  return out;
}

double truncated_upper(double center, double sigma, const QuadratureSpec& spec) {
  return center + spec.tail_cutoff_sigmas * sigma;
}

namespace {

double tensor_sum(const ScalarField& f, const std::vector<std::vector<QuadratureNode>>& rules) {
  const std::size_t d = rules.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> point(d);
  CompensatedSum total;
  for (const auto& r : rules)
    if (r.empty()) return 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      point[k] = rules[k][idx[k]].x;
      w *= rules[k][idx[k]].w;
    }
    total.add(w * f(point));
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++idx[k] < rules[k].size()) break;
      idx[k] = 0;
    }
    if (k == d) break;
  }
  return total.value();
}

}  // namespace

QuadratureResult integrate(const ScalarField& f, std::span<const Interval> bounds,
                           const QuadratureSpec& spec, double tolerance) {
  spec.validate();
  if (bounds.empty() || bounds.size() > 3)
    throw DomainError("integrate: dimension must be 1, 2 or 3");
  const int coarse_nodes = std::max(2, spec.nodes_per_panel / 2);
  std::vector<std::vector<QuadratureNode>> fine;
  std::vector<std::vector<QuadratureNode>> coarse;
  for (const auto& iv : bounds) {
    fine.push_back(composite_rule(iv, spec.nodes_per_panel, spec.panels_per_dim));
    coarse.push_back(composite_rule(iv, coarse_nodes, spec.panels_per_dim));
  }
  QuadratureResult r;
  r.value = tensor_sum(f, fine);
  r.error_estimate = std::abs(r.value - tensor_sum(f, coarse));
  if (r.error_estimate > 100.0 * tolerance * std::max(1.0, std::abs(r.value)))
  {
    std::ostringstream msg;
    msg << "integrate: refinement levels differ by " << r.error_estimate << ", above 100 x tolerance "
        << tolerance;
    throw NonConvergenceError(msg.str());
  }
  return r;
}

}  // namespace linkstab::numerics
