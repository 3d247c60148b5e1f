#pragma once

// Two-state Markov chain of link connectivity under the hard connection
// model: the link is on while the nodes are within r0 of each other.

#include "linkstab/jointdist.hpp"
#include "linkstab/mobility.hpp"
#include "linkstab/numerics.hpp"

namespace linkstab::linkmodel {

struct ConnectionModel {
  double r0 = 50.0;  // m

  /// r0 = (psi / gamma0)^(1 / eta) from the path-loss link budget.
  static ConnectionModel from_link_budget(double psi, double gamma0, double eta);
  void validate() const;
};

double connection_range(double psi, double gamma0, double eta);

struct LinkState {
  int value = 0;  // 1 = link active
  bool active() const { return value == 1; }
};

LinkState link_indicator(double r, const ConnectionModel& model);

// p[b][a] = P(L_2 = a | L_1 = b); pi = (P(L = 0), P(L = 1)). A row whose
// conditioning state has steady-state probability below 1e-12 is left
// undefined (NaN entries, defined[b] == false).
struct TransitionMatrix {
  double p[2][2] = {};
  double pi[2] = {};
  bool defined[2] = {true, true};

  bool fully_defined() const { return defined[0] && defined[1]; }
  // Throws UndefinedRatioError if any row is undefined.
  void require_defined() const;
};

// q[c][b][a] = P(L_1 = c, L_2 = b, L_3 = a).
struct JointPmf3 {
  double q[2][2][2] = {};

  double total() const;
};

struct LinkChain {
  TransitionMatrix transition;
  JointPmf3 joint;
  double error_estimate = 0.0;  // quadrature + truncation + tail, absolute mass
};

/// Transition matrix and three-step pmf from one pass over the region boxes.
LinkChain analyze_link(double dt, const mobility::OUParams& params, double beta,
                       const ConnectionModel& model, const numerics::SeriesTruncation& trunc,
                       const numerics::QuadratureSpec& quad);

TransitionMatrix transition_matrix(double dt, const mobility::OUParams& params, double beta,
                                   const ConnectionModel& model, const numerics::SeriesTruncation& trunc,
                                   const numerics::QuadratureSpec& quad);

JointPmf3 joint_pmf3(double dt, const mobility::OUParams& params, double beta,
                     const ConnectionModel& model, const numerics::SeriesTruncation& trunc,
                     const numerics::QuadratureSpec& quad);

/// Three-step pmf of a stationary Markov chain with the given transitions.
JointPmf3 markov_pmf3(const TransitionMatrix& t);

// Information terms of a three-step pmf, in bits.
struct MutualInformation {
  double with_past = 0.0;    // I(L3; L1, L2)
  double with_last = 0.0;    // I(L3; L2)
  double conditional = 0.0;  // I(L3; L1 | L2)
};

MutualInformation mutual_information(const JointPmf3& q);

/// I(L3; L1 | L2) / I(L3; L1, L2). Throws UndefinedRatioError when the
/// denominator is below 1e-12 bits.
double mutual_info_ratio(const JointPmf3& q);

bool markov_validity(double dt, double tau);

/// H(L2 | L1) in bits per sample.
double entropy_rate(const TransitionMatrix& t);

/// Binary entropy of pi, in bits.
double marginal_entropy(const double (&pi)[2]);

double binary_entropy(double p);

}  // namespace linkstab::linkmodel
