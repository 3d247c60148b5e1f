#include "linkstab/linkmodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "linkstab/distance.hpp"
#include "linkstab/errors.hpp"

namespace linkstab::linkmodel {

namespace {

constexpr double kMinStateProbability = 1e-12;
constexpr double kMinInformationBits = 1e-12;

// x - 1 - ln x, accurate near x = 1.
double kl_kernel(double x) {
  const double d = x - 1.0;
  if (std::abs(d) < 1e-2) {
    double term = d * d;
    double sum = 0.0;
    for (int k = 2; k < 30; ++k) {
      sum += ((k & 1) ? -1.0 : 1.0) * term / k;
      term *= d;
      if (std::abs(term) < 1e-20 * std::abs(sum)) break;
    }
    return sum;
  }
  return d - std::log(x);
}

// sum_i P_i ln(P_i / Q_i) for two pmfs with equal total, written as
// sum_i P_i h(Q_i / P_i) so every term is non-negative.
template <std::size_t N>
double kl_bits(const double (&p)[N], const double (&q)[N]) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (p[i] <= 0.0) {
      sum += q[i];
      continue;
    }
    sum += p[i] * kl_kernel(q[i] / p[i]);
  }
  return sum / std::numbers::ln2;
}

}  // namespace

ConnectionModel ConnectionModel::from_link_budget(double psi, double gamma0, double eta) {
  return {connection_range(psi, gamma0, eta)};
}

void ConnectionModel::validate() const {
  if (!(r0 > 0.0)) throw DomainError("ConnectionModel: r0 must be > 0");
}

double connection_range(double psi, double gamma0, double eta) {
  if (!(psi > 0.0 && gamma0 > 0.0 && eta > 0.0))
    throw DomainError("connection_range: psi, gamma0 and eta must be > 0");
  return std::pow(psi / gamma0, 1.0 / eta);
}

LinkState link_indicator(double r, const ConnectionModel& model) {
  return {r <= model.r0 ? 1 : 0};
}

void TransitionMatrix::require_defined() const {
  for (int b = 0; b < 2; ++b)
    if (!defined[b])
      throw UndefinedRatioError("transition row " + std::to_string(b) +
                                " undefined: steady-state probability below 1e-12");
}

double JointPmf3::total() const {
  double s = 0.0;
  for (const auto& plane : q)
    for (const auto& row : plane)
      for (double v : row) s += v;
  return s;
}

LinkChain analyze_link(double dt, const mobility::OUParams& params, double beta,
                       const ConnectionModel& model, const numerics::SeriesTruncation& trunc,
                       const numerics::QuadratureSpec& quad) {
  model.validate();
  if (!(dt > 0.0)) throw DomainError("analyze_link: dt must be > 0");
  const jointdist::TrivariateParams tp{beta, jointdist::build_covariance(dt, params), trunc};
  const jointdist::BoxMasses boxes = jointdist::region_box_masses(tp, model.r0, quad);
  const distance::LinkProbabilities steady = distance::steady_state_link_prob(beta, params, model.r0);

  LinkChain out;
  out.error_estimate = boxes.error_estimate;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) out.joint.q[c][b][a] = boxes.mass[c][b][a];

  auto& t = out.transition;
  t.pi[0] = steady.off;
  t.pi[1] = steady.on;
  for (int b = 0; b < 2; ++b) {
    if (t.pi[b] < kMinStateProbability) {
      t.defined[b] = false;
      t.p[b][0] = t.p[b][1] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    for (int a = 0; a < 2; ++a) {
      // r3 integrated over the whole half-line: both regions of L_3.
      const double numer = boxes.mass[b][a][0] + boxes.mass[b][a][1];
      t.p[b][a] = numer / t.pi[b];
    }
  }
  return out;
}

TransitionMatrix transition_matrix(double dt, const mobility::OUParams& params, double beta,
                                   const ConnectionModel& model, const numerics::SeriesTruncation& trunc,
                                   const numerics::QuadratureSpec& quad) {
  return analyze_link(dt, params, beta, model, trunc, quad).transition;
}

JointPmf3 joint_pmf3(double dt, const mobility::OUParams& params, double beta,
                     const ConnectionModel& model, const numerics::SeriesTruncation& trunc,
                     const numerics::QuadratureSpec& quad) {
  return analyze_link(dt, params, beta, model, trunc, quad).joint;
}

JointPmf3 markov_pmf3(const TransitionMatrix& t) {
  t.require_defined();
  JointPmf3 out;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) out.q[c][b][a] = t.pi[c] * t.p[c][b] * t.p[b][a];
  return out;
}

MutualInformation mutual_information(const JointPmf3& joint) {
  const double total = joint.total();
  if (!(total > 0.0)) throw DomainError("mutual_information: pmf has no mass");

  double q[8];
  double past[4] = {};    // (c, b)
  double recent[4] = {};  // (b, a)
  double mid[2] = {};     // b
  double last[2] = {};    // a
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const double v = joint.q[c][b][a] / total;
        q[4 * c + 2 * b + a] = v;
        past[2 * c + b] += v;
        recent[2 * b + a] += v;
        mid[b] += v;
        last[a] += v;
      }

  double prod_past[8];
  double markov[8];
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const int i = 4 * c + 2 * b + a;
        prod_past[i] = past[2 * c + b] * last[a];
        markov[i] = mid[b] > 0.0 ? past[2 * c + b] * recent[2 * b + a] / mid[b] : 0.0;
      }
  double prod_last[4];
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) prod_last[2 * b + a] = mid[b] * last[a];

  MutualInformation mi;
  mi.with_past = kl_bits(q, prod_past);
  mi.conditional = kl_bits(q, markov);
  mi.with_last = kl_bits(recent, prod_last);
  return mi;
}

double mutual_info_ratio(const JointPmf3& q) {
  const MutualInformation mi = mutual_information(q);
  if (!(mi.with_past > kMinInformationBits))
    throw UndefinedRatioError("mutual_info_ratio: I(L3; L1, L2) below 1e-12 bits");
  return mi.conditional / mi.with_past;
}

bool markov_validity(double dt, double tau) {
  if (!(dt > 0.0 && tau > 0.0)) throw DomainError("markov_validity: dt and tau must be > 0");
  return dt / tau >= 1.0;
}

double binary_entropy(double p) {
  double h = 0.0;
  for (double v : {p, 1.0 - p})
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double entropy_rate(const TransitionMatrix& t) {
  double h = 0.0;
  for (int b = 0; b < 2; ++b) {
    if (!t.defined[b]) continue;  // weight below 1e-12
    for (int a = 0; a < 2; ++a) {
      const double v = t.p[b][a];
      if (v > 0.0) h -= t.pi[b] * v * std::log2(v);
    }
  }
  return h;
}

double marginal_entropy(const double (&pi)[2]) { return binary_entropy(pi[1]); }

}  // namespace linkstab::linkmodel
