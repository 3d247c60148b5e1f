#pragma once

// Law of the inter-node distance R = |Z2 - Z1|. Each axis of the difference
// process is Gaussian with variance g(t), so R is Rician(beta, sqrt(g)).

#include "linkstab/mobility.hpp"

namespace linkstab::distance {

struct RicianLaw {
  double nu = 0.0;  // m, noncentrality (the desired separation beta)
  double g = 1.0;   // m^2, per-axis variance of the difference process

  void validate() const;
};

double g_of_t(double t, const mobility::OUParams& params);

/// Stationary law: g = D tau.
RicianLaw stationary_law(double beta, const mobility::OUParams& params);

double rician_pdf(double r, const RicianLaw& law);
double rician_log_pdf(double r, const RicianLaw& law);
double rician_cdf(double r, const RicianLaw& law);

struct LinkProbabilities {
  double on;   // P(L = 1) = P(R <= r0)
  double off;  // P(L = 0), computed directly rather than as 1 - on
};

LinkProbabilities steady_state_link_prob(double beta, const mobility::OUParams& params, double r0);

}  // namespace linkstab::distance
