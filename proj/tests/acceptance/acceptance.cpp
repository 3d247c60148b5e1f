// End-to-end checks of the published properties and the oracle agreements.
// Prints one line per criterion, "PASS <n> ..." or "FAIL <n> ...", and exits
// non-zero if any criterion fails.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "linkstab/distance.hpp"
#include "linkstab/errors.hpp"
#include "linkstab/jointdist.hpp"
#include "linkstab/linkmodel.hpp"
#include "linkstab/mobility.hpp"
#include "linkstab/montecarlo.hpp"
#include "linkstab/numerics.hpp"
#include "linkstab/parallel.hpp"
#include "linkstab/rng.hpp"

using namespace linkstab;

namespace {

const mobility::OUParams kBase{1.0, 100.0, 0.0, 0.0};
const linkmodel::ConnectionModel kModel{50.0};
constexpr double kBeta = 10.0;

mobility::OUParams ou(double tau, double sqrt_d) { return {tau, sqrt_d, 0.0, 0.0}; }

linkmodel::LinkChain chain_at(double dt, const mobility::OUParams& p) {
  return linkmodel::analyze_link(dt, p, kBeta, kModel, {}, {});
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s %d %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Runs one criterion; any exception counts as a failure with its message.
void check(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void criterion1() {
  bool ok = true;
  std::string detail = "R_MI:";
  for (double dt : {1.0, 2.0, 5.0, 10.0}) {
    const auto ch = chain_at(dt, kBase);
    const auto mi = linkmodel::mutual_information(ch.joint);
    const double raw = mi.with_past > 0.0 ? mi.conditional / mi.with_past : 0.0;
    try {
      const double r = linkmodel::mutual_info_ratio(ch.joint);
      ok = ok && r < 0.02;
      detail += fmt(" dt=%g", dt) + fmt(" %.3e", r);
    } catch (const UndefinedRatioError&) {
      // Independence limit: the denominator vanishes, so only the raw
      // quotient is reported and it must still be below the bound.
      ok = ok && dt >= 10.0 && raw < 0.02;
      detail += fmt(" dt=%g undefined", dt) + fmt(" (I=%.1e bits,", mi.with_past) + fmt(" raw %.1e)", raw);
    }
  }
  report(1, ok, detail);
}

void criterion2() {
  const auto t = chain_at(10.0, kBase).transition;
  const double h = linkmodel::entropy_rate(t);
  const double hm = linkmodel::marginal_entropy(t.pi);
  const double gap = std::abs(h - hm);
  report(2, gap < 0.01, fmt("H(L2|L1)=%.6f", h) + fmt(" H(L2)=%.6f", hm) + fmt(" gap=%.2e bit", gap));
}

void criterion3() {
  double best = -1.0, arg = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double sd = 10.0 * k;
    const double h = linkmodel::entropy_rate(chain_at(1.0, ou(1.0, sd)).transition);
    if (h > best) {
      best = h;
      arg = sd;
    }
  }
  report(3, arg >= 40.0 && arg <= 70.0 && best > 0.9, fmt("argmax sqrt(D)=%g", arg) + fmt(" peak=%.4f bit", best));
}

void criterion4() {
  const int n = 30;
  std::vector<double> taus(n);
  for (int i = 0; i < n; ++i) taus[i] = 0.05 * std::pow(10.0 / 0.05, static_cast<double>(i) / (n - 1));
  bool ok = true;
  std::string detail;
  for (double sd : {50.0, 100.0}) {
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = linkmodel::entropy_rate(chain_at(1.0, ou(taus[i], sd)).transition);
    const auto peak = static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
    bool unimodal = peak > 0 && peak < n - 1;
    for (int i = 1; i <= peak; ++i) unimodal = unimodal && h[i] > h[i - 1];
    for (int i = peak + 1; i < n; ++i) unimodal = unimodal && h[i] < h[i - 1];
    bool decreasing = true;
    for (int i = 1; i < n; ++i)
      if (taus[i - 1] >= 2.0) decreasing = decreasing && h[i] < h[i - 1];
    ok = ok && unimodal && decreasing;
    detail += fmt("sqrt(D)=%g:", sd) + fmt(" peak tau=%.3f", taus[peak]) + fmt(" H=%.4f", h[peak]) +
              (unimodal ? " single-interior-max" : " NOT-unimodal") + (decreasing ? " decreasing" : " NOT-decreasing") +
              "; ";
  }
  report(4, ok, detail);
}

struct OraclePoint {
  const char* sweep;
  double dt, tau, sqrt_d;
};

void criterion5() {
  const std::vector<OraclePoint> points = {
      {"mi", 0.2, 1.0, 100.0},       {"mi", 0.5, 1.0, 100.0},     {"mi", 1.0, 1.0, 100.0},
      {"h-dt", 0.5, 1.0, 50.0},      {"h-dt", 1.0, 1.0, 50.0},    {"h-dt", 2.0, 1.0, 200.0},
      {"h-d", 1.0, 1.0, 20.0},       {"h-d", 1.0, 1.0, 60.0},     {"h-d", 1.0, 1.0, 150.0},
      {"h-tau", 1.0, 0.5, 50.0},     {"h-tau", 1.0, 2.0, 50.0},   {"h-tau", 1.0, 5.0, 50.0},
  };
  bool ok = true;
  int compared = 0, unresolved = 0;
  double worst_z = 0.0, worst_gap = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const OraclePoint& pt = points[i];
    const mobility::OUParams p = ou(pt.tau, pt.sqrt_d);
    const auto ch = chain_at(pt.dt, p);
    montecarlo::McConfig mc;
    mc.seed += i;
    const auto counts = montecarlo::simulate_link_counts(mc, pt.dt, p, kBeta, kModel);
    const auto tr = montecarlo::transition_estimates(counts);
    tr.require_sufficient();
    std::vector<std::pair<const char*, double>> zs;
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) zs.emplace_back("p", montecarlo::compare(ch.transition.p[b][a], tr.p[b][a]));
    zs.emplace_back("pi", montecarlo::compare(ch.transition.pi[1], montecarlo::steady_state_estimate(counts)));
    const double h = linkmodel::entropy_rate(ch.transition);
    const auto hmc = montecarlo::entropy_rate_estimate(counts, mc);
    zs.emplace_back("H", montecarlo::compare(h, hmc));
    const double gap = std::abs(h - hmc.value);
    worst_gap = std::max(worst_gap, gap);

    const auto mi = linkmodel::mutual_information(ch.joint);
    std::string rmi = "R_MI unresolved";
    if (mi.with_past >= 1e-3) {
      const auto r = montecarlo::mi_ratio_estimate(counts, mc);
      const double z = r ? montecarlo::compare(linkmodel::mutual_info_ratio(ch.joint), *r) : 1e9;
      zs.emplace_back("R", z);
      rmi = fmt("R_MI z=%+.2f", z);
    } else {
      ++unresolved;
    }
    double point_worst = 0.0;
    for (const auto& [name, z] : zs) {
      ++compared;
      point_worst = std::max(point_worst, std::abs(z));
    }
    worst_z = std::max(worst_z, point_worst);
    const bool point_ok = point_worst <= 3.0 && gap < 0.02;
    ok = ok && point_ok;
    std::printf("  [5] %-5s dt=%-4g tau=%-4g sqrt(D)=%-4g max|z|=%.2f Hgap=%.4f %s%s\n", pt.sweep, pt.dt, pt.tau,
                pt.sqrt_d, point_worst, gap, rmi.c_str(), point_ok ? "" : "  <-- out of tolerance");
  }
  report(5, ok,
         std::to_string(points.size()) + " points, " + std::to_string(compared) + " comparisons at 1e6 transitions" +
             fmt(", max|z|=%.2f", worst_z) + fmt(", max entropy gap=%.4f bit", worst_gap) + ", R_MI unresolved at " +
             std::to_string(unresolved) + " points (I(L3;L1,L2) < 1e-3 bit)");
}

void criterion6() {
  const jointdist::TrivariateParams p{kBeta, jointdist::build_covariance(1.0, kBase), {}};
  const numerics::QuadratureSpec quad{12, 4, 10.0};
  const numerics::Interval support = jointdist::radial_support(p, quad);
  const std::vector<numerics::Interval> box{support, support, support};
  const double mass = numerics::integrate(
                          [&](std::span<const double> r) { return jointdist::trivariate_pdf(r[0], r[1], r[2], p); },
                          box, quad, 1e-3)
                          .value;
  bool ok = std::abs(mass - 1.0) < 1e-3;
  std::string detail = fmt("mass=%.6f;", mass);

  const distance::RicianLaw law = distance::stationary_law(kBeta, kBase);
  const numerics::QuadratureSpec inner{24, 4, 10.0};
  for (double r1 : {10.0, 50.0, 100.0}) {
    const double m = numerics::integrate(
                         [&](std::span<const double> r) { return jointdist::marginalize_r3(r1, r[0], p, inner); },
                         std::span(&support, 1), inner, 1e-6)
                         .value;
    const double want = distance::rician_pdf(r1, law);
    const double rel = std::abs(m - want) / want;
    ok = ok && rel < 1e-4;
    detail += fmt(" r=%g", r1) + fmt(" rel err %.1e", rel);
  }
  report(6, ok, detail);
}

void criterion7() {
  double worst = 0.0;
  int n = 0;
  for (double phi = 0.01; phi < 0.995; phi += 0.01, ++n) {
    const double dt = -std::log(phi);
    worst = std::max(worst, jointdist::build_covariance(dt, kBase).w13_residual);
  }
  for (double dt : {1e-3, 1e-2, 10.0, 30.0}) {
    worst = std::max(worst, jointdist::build_covariance(dt, kBase).w13_residual);
    ++n;
  }
  report(7, worst <= 1e-12, std::to_string(n) + fmt(" phi values, max |w13|/max|W| = %.2e", worst));
}

void criterion8() {
  mobility::OUParams p = kBase;
  p.mu_x = 20.0;
  const double x0 = -30.0;
  const int k = 5;
  const std::size_t n = 1'000'000;
  bool ok = true;
  std::string detail;
  for (double dt : {0.1, 1.0, 10.0}) {
    const mobility::Ar1Stepper stepper(p, dt, mobility::Axis::X);
    constexpr std::size_t kBlocks = 64;
    std::vector<double> sum(kBlocks), sum2(kBlocks);
    parallel_for(kBlocks, std::thread::hardware_concurrency(), [&](std::size_t b) {
      Xoshiro256 rng(8, 1000 * static_cast<std::uint64_t>(dt * 10) + b);
      for (std::size_t i = b; i < n; i += kBlocks) {
        double x = x0;
        for (int s = 0; s < k; ++s) x = stepper(x, rng.normal());
        sum[b] += x;
        sum2[b] += x * x;
      }
    });
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < kBlocks; ++b) {
      s1 += sum[b];
      s2 += sum2[b];
    }
    const double mean = s1 / n;
    const double var = (s2 - n * mean * mean) / (n - 1);
    const mobility::Moments m = mobility::ou_moments(k * dt, x0, p, mobility::Axis::X);
    const double zm = (mean - m.mean) / std::sqrt(m.variance / n);
    const double zv = (var - m.variance) / (m.variance * std::sqrt(2.0 / (n - 1)));
    ok = ok && std::abs(zm) <= 3.0 && std::abs(zv) <= 3.0;
    detail += fmt("dt=%g:", dt) + fmt(" z_mean=%+.2f", zm) + fmt(" z_var=%+.2f; ", zv);
  }
  report(8, ok, detail);
}

void criterion9() {
  const distance::RicianLaw law = distance::stationary_law(kBeta, kBase);
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double r = 12.5 * i;  // 12.5 .. 250 m
    // Oracle: adaptive Gauss-Kronrod over the density written with Boost's I0.
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) {
          const double z = law.nu * x / law.g;
          return x / law.g * std::exp(-(x - law.nu) * (x - law.nu) / (2.0 * law.g)) *
                 boost::math::cyl_bessel_i(0, z) * std::exp(-z);
        },
        0.0, r, 20, 1e-14);
    worst = std::max(worst, std::abs(distance::rician_cdf(r, law) - oracle));
  }
  report(9, worst <= 1e-8, fmt("20 points on [12.5, 250] m, max |cdf - quadrature| = %.2e", worst));
}

}  // namespace

int main() {
  check(1, criterion1);
  check(2, criterion2);
  check(3, criterion3);
  check(4, criterion4);
  check(5, criterion5);
  check(6, criterion6);
  check(7, criterion7);
  check(8, criterion8);
  check(9, criterion9);
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
