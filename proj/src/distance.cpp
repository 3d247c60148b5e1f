#include "linkstab/distance.hpp"

#include <cmath>

#include "linkstab/errors.hpp"
#include "linkstab/numerics.hpp"

namespace linkstab::distance {

void RicianLaw::validate() const {
  if (!(g > 0.0)) throw DomainError("RicianLaw: g must be > 0");
  if (!(nu >= 0.0)) throw DomainError("RicianLaw: nu must be >= 0");
}

double g_of_t(double t, const mobility::OUParams& params) {
  if (!(t >= 0.0)) throw DomainError("g_of_t: t must be >= 0");
  params.validate();
  return params.diffusion() * params.tau * -std::expm1(-2.0 * t / params.tau);
}

RicianLaw stationary_law(double beta, const mobility::OUParams& params) {
  params.validate();
  RicianLaw law{beta, params.diffusion() * params.tau};
  law.validate();
  return law;
}

double rician_log_pdf(double r, const RicianLaw& law) {
  if (!(r >= 0.0)) throw DomainError("rician_pdf: r must be >= 0");
  law.validate();
  if (r == 0.0) return numerics::kNegInf;
  const double d = r - law.nu;
  return std::log(r / law.g) - d * d / (2.0 * law.g) + numerics::log_scaled_bessel_i(0, law.nu * r / law.g);
}

double rician_pdf(double r, const RicianLaw& law) { return std::exp(rician_log_pdf(r, law)); }

double rician_cdf(double r, const RicianLaw& law) {
  if (!(r >= 0.0)) throw DomainError("rician_cdf: r must be >= 0");
  law.validate();
  if (std::isinf(r)) return 1.0;
  const double s = std::sqrt(law.g);
  return 1.0 - numerics::marcum_q1(law.nu / s, r / s);
}

LinkProbabilities steady_state_link_prob(double beta, const mobility::OUParams& params, double r0) {
  if (!(r0 > 0.0)) throw DomainError("steady_state_link_prob: r0 must be > 0");
  const RicianLaw law = stationary_law(beta, params);
  if (std::isinf(r0)) return {1.0, 0.0};
  const double s = std::sqrt(law.g);
  const double off = numerics::marcum_q1(law.nu / s, r0 / s);
  return {1.0 - off, off};
}

}  // namespace linkstab::distance
