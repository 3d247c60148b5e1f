#include "linkstab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "linkstab/errors.hpp"
#include "linkstab/parallel.hpp"
#include "linkstab/rng.hpp"

namespace linkstab::montecarlo {

namespace {

constexpr std::uint64_t kMinConditioningCount = 100;
constexpr std::uint64_t kBootstrapStream = 0xb007'57a9'0000'0000ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Ratio estimator sum(y) / sum(x) with a between-chain (cluster) standard
// error, which stays valid when samples within a chain are correlated.
McEstimate ratio_estimate(const std::vector<double>& y, const std::vector<double>& x) {
  double sy = 0.0;
  double sx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sy += y[i];
    sx += x[i];
  }
  McEstimate e;
  e.n = static_cast<std::uint64_t>(sx);
  if (sx <= 0.0) {
    e.value = e.std_err = kNaN;
    return e;
  }
  e.value = sy / sx;
  const double k = static_cast<double>(y.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - e.value * x[i];
    ss += r * r;
  }
  e.std_err = k > 1.0 ? std::sqrt(ss * k / (k - 1.0)) / sx : 0.0;
  return e;
}

double plugin_entropy_rate(const ChainCounts& c) {
  const double n = static_cast<double>(c.transitions[0] + c.transitions[1] + c.transitions[2] +
                                       c.transitions[3]);
  if (n <= 0.0) return kNaN;
  double h = 0.0;
  for (int b = 0; b < 2; ++b) {
    const double nb = static_cast<double>(c.transitions[2 * b] + c.transitions[2 * b + 1]);
    for (int a = 0; a < 2; ++a) {
      const double nba = static_cast<double>(c.transitions[2 * b + a]);
      if (nba > 0.0) h -= (nba / n) * std::log2(nba / nb);
    }
  }
  return h;
}

// Plug-in entropy (bits) of a table of counts.
template <std::size_t N>
double plugin_entropy(const std::array<double, N>& counts) {
  double n = 0.0;
  for (double v : counts) n += v;
  double h = 0.0;
  for (double v : counts)
    if (v > 0.0) h -= (v / n) * std::log2(v / n);
  return h;
}

// I(L3; L1 | L2) / I(L3; L1, L2) from triple counts via joint entropies.
std::optional<double> plugin_mi_ratio(const ChainCounts& c) {
  std::array<double, 8> joint{};
  std::array<double, 4> first_two{}, last_two{};
  std::array<double, 2> middle{}, last{};
  double n = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double v = static_cast<double>(c.triples[i]);
    joint[i] = v;
    first_two[i >> 1] += v;
    last_two[i & 3] += v;
    middle[(i >> 1) & 1] += v;
    last[i & 1] += v;
    n += v;
  }
  if (n <= 0.0) return std::nullopt;
  const double h123 = plugin_entropy(joint);
  const double h12 = plugin_entropy(first_two);
  const double h23 = plugin_entropy(last_two);
  const double h2 = plugin_entropy(middle);
  const double h3 = plugin_entropy(last);
  const double with_past = h3 + h12 - h123;
  const double conditional = h12 + h23 - h2 - h123;
  if (!(with_past > 0.0)) return std::nullopt;
  return conditional / with_past;
}

ChainCounts add(ChainCounts a, const ChainCounts& b) {
  for (int i = 0; i < 2; ++i) a.states[i] += b.states[i];
  for (int i = 0; i < 4; ++i) a.transitions[i] += b.transitions[i];
  for (int i = 0; i < 8; ++i) a.triples[i] += b.triples[i];
  return a;
}

// Bootstrap over chains: resample chains with replacement and recompute a
// statistic of the pooled counts. Returns the standard deviation of the
// finite replicates.
template <class Stat>
double bootstrap_std_err(const LinkCounts& counts, const McConfig& config, Stat&& stat) {
  const std::size_t k = counts.chains.size();
  Xoshiro256 rng(config.seed, kBootstrapStream);
  std::vector<double> reps;
  reps.reserve(config.bootstrap_resamples);
  for (std::uint32_t r = 0; r < config.bootstrap_resamples; ++r) {
    ChainCounts pooled;
    for (std::size_t i = 0; i < k; ++i) {
      const auto pick = static_cast<std::size_t>(
          (static_cast<unsigned __int128>(rng()) * k) >> 64);
      pooled = add(pooled, counts.chains[pick]);
    }
    const std::optional<double> v = stat(pooled);
    if (v && std::isfinite(*v)) reps.push_back(*v);
  }
  if (reps.size() < 2) return kNaN;
  double mean = 0.0;
  for (double v : reps) mean += v;
  mean /= static_cast<double>(reps.size());
  double ss = 0.0;
  for (double v : reps) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(reps.size() - 1));
}

}  // namespace

std::uint64_t McConfig::effective_burn_in(double dt, double tau) const {
  if (burn_in) return *burn_in;
  if (stationary_start) return 0;
  return static_cast<std::uint64_t>(std::ceil(100.0 * tau / dt));
}

void McConfig::validate() const {
  if (n_samples < 1) throw DomainError("McConfig: n_samples must be >= 1");
  if (chains < 2) throw DomainError("McConfig: at least two chains are required");
  if (bootstrap_resamples < 2) throw DomainError("McConfig: bootstrap_resamples must be >= 2");
}

ChainCounts LinkCounts::total() const {
  ChainCounts t;
  for (const auto& c : chains) t = add(t, c);
  return t;
}

LinkCounts simulate_link_counts(const McConfig& config, double dt, const mobility::OUParams& params,
                                double beta, const linkmodel::ConnectionModel& model) {
  config.validate();
  model.validate();
  const mobility::PairConfig pair{params, beta};
  pair.validate();
  if (!(dt > 0.0)) throw DomainError("simulate_link_counts: dt must be > 0");

  using mobility::Axis;
  const auto n1 = pair.node(1);
  const auto n2 = pair.node(2);
  const mobility::Ar1Stepper sx1(n1, dt, Axis::X), sy1(n1, dt, Axis::Y);
  const mobility::Ar1Stepper sx2(n2, dt, Axis::X), sy2(n2, dt, Axis::Y);
  const std::uint64_t transitions_per_chain = (config.n_samples + config.chains - 1) / config.chains;
  const std::uint64_t burn = config.effective_burn_in(dt, params.tau);

  LinkCounts out;
  out.chains.resize(config.chains);
  parallel_for(config.chains, config.threads, [&](std::size_t chain) {
    Xoshiro256 gx1(config.seed, 4 * chain + 0), gy1(config.seed, 4 * chain + 1);
    Xoshiro256 gx2(config.seed, 4 * chain + 2), gy2(config.seed, 4 * chain + 3);
    double x1 = n1.mu_x, y1 = n1.mu_y, x2 = n2.mu_x, y2 = n2.mu_y;
    if (config.stationary_start) {
      x1 = mobility::sample_stationary(n1, gx1, Axis::X);
      y1 = mobility::sample_stationary(n1, gy1, Axis::Y);
      x2 = mobility::sample_stationary(n2, gx2, Axis::X);
      y2 = mobility::sample_stationary(n2, gy2, Axis::Y);
    }
    auto advance = [&] {
      x1 = sx1(x1, gx1.normal());
      y1 = sy1(y1, gy1.normal());
      x2 = sx2(x2, gx2.normal());
      y2 = sy2(y2, gy2.normal());
    };
    auto state = [&] { return linkmodel::link_indicator(std::hypot(x2 - x1, y2 - y1), model).value; };

    for (std::uint64_t i = 0; i < burn; ++i) advance();
    ChainCounts& c = out.chains[chain];
    int prev2 = -1;
    int prev = state();
    c.states[prev]++;
    for (std::uint64_t i = 0; i < transitions_per_chain; ++i) {
      advance();
      const int cur = state();
      c.states[cur]++;
      c.transitions[2 * prev + cur]++;
      if (prev2 >= 0) c.triples[4 * prev2 + 2 * prev + cur]++;
      prev2 = prev;
      prev = cur;
    }
  });
  return out;
}

void McTransition::require_sufficient() const {
  for (int b = 0; b < 2; ++b)
    if (!sufficient[b])
      throw InsufficientCountError("link state " + std::to_string(b) +
                                   " observed fewer than 100 times as a conditioning state");
}

McTransition transition_estimates(const LinkCounts& counts) {
  McTransition out;
  const std::size_t k = counts.chains.size();
  for (int b = 0; b < 2; ++b) {
    std::vector<double> denom(k);
    for (std::size_t i = 0; i < k; ++i)
      denom[i] = static_cast<double>(counts.chains[i].transitions[2 * b] +
                                     counts.chains[i].transitions[2 * b + 1]);
    for (int a = 0; a < 2; ++a) {
      std::vector<double> numer(k);
      for (std::size_t i = 0; i < k; ++i)
        numer[i] = static_cast<double>(counts.chains[i].transitions[2 * b + a]);
      out.p[b][a] = ratio_estimate(numer, denom);
    }
    if (out.p[b][0].n < kMinConditioningCount) {
      out.sufficient[b] = false;
      for (int a = 0; a < 2; ++a) out.p[b][a].value = out.p[b][a].std_err = kNaN;
    }
  }
  return out;
}

std::array<McEstimate, 8> joint3_estimates(const LinkCounts& counts) {
  const std::size_t k = counts.chains.size();
  std::vector<double> denom(k);
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (auto v : counts.chains[i].triples) s += static_cast<double>(v);
    denom[i] = s;
  }
  std::array<McEstimate, 8> out;
  for (int cell = 0; cell < 8; ++cell) {
    std::vector<double> numer(k);
    for (std::size_t i = 0; i < k; ++i) numer[i] = static_cast<double>(counts.chains[i].triples[cell]);
    out[cell] = ratio_estimate(numer, denom);
  }
  return out;
}

McEstimate steady_state_estimate(const LinkCounts& counts) {
  const std::size_t k = counts.chains.size();
  std::vector<double> on(k), all(k);
  for (std::size_t i = 0; i < k; ++i) {
    on[i] = static_cast<double>(counts.chains[i].states[1]);
    all[i] = static_cast<double>(counts.chains[i].states[0] + counts.chains[i].states[1]);
  }
  return ratio_estimate(on, all);
}

McEstimate entropy_rate_estimate(const LinkCounts& counts, const McConfig& config) {
  const ChainCounts pooled = counts.total();
  McEstimate e;
  e.value = plugin_entropy_rate(pooled);
  e.n = pooled.transitions[0] + pooled.transitions[1] + pooled.transitions[2] + pooled.transitions[3];
  e.std_err = bootstrap_std_err(counts, config,
                                [](const ChainCounts& c) { return std::optional(plugin_entropy_rate(c)); });
  return e;
}

std::optional<McEstimate> mi_ratio_estimate(const LinkCounts& counts, const McConfig& config) {
  const ChainCounts pooled = counts.total();
  const auto value = plugin_mi_ratio(pooled);
  if (!value) return std::nullopt;
  McEstimate e;
  e.value = *value;
  for (auto v : pooled.triples) e.n += v;
  e.std_err = bootstrap_std_err(counts, config, plugin_mi_ratio);
  return e;
}

McTransition empirical_transition(const McConfig& config, double dt, const mobility::OUParams& params,
                                  double beta, const linkmodel::ConnectionModel& model) {
  return transition_estimates(simulate_link_counts(config, dt, params, beta, model));
}

std::array<McEstimate, 8> empirical_joint3(const McConfig& config, double dt,
                                           const mobility::OUParams& params, double beta,
                                           const linkmodel::ConnectionModel& model) {
  return joint3_estimates(simulate_link_counts(config, dt, params, beta, model));
}

McEstimate empirical_entropy_rate(const McConfig& config, double dt, const mobility::OUParams& params,
                                  double beta, const linkmodel::ConnectionModel& model) {
  return entropy_rate_estimate(simulate_link_counts(config, dt, params, beta, model), config);
}

double compare(double analytical, const McEstimate& empirical) {
  if (!(empirical.std_err > 0.0))
    throw DomainError("compare: degenerate estimate with zero standard error");
  return (analytical - empirical.value) / empirical.std_err;
}

void write_counts_csv(std::ostream& os, const LinkCounts& counts) {
  const ChainCounts t = counts.total();
  os << "state_prev,state_next,count\n";
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) os << b << ',' << a << ',' << t.transitions[2 * b + a] << '\n';
}

}  // namespace linkstab::montecarlo
