#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "linkstab/errors.hpp"
#include "linkstab/linkmodel.hpp"
#include "linkstab/montecarlo.hpp"

using namespace linkstab;
using namespace linkstab::montecarlo;

namespace {

const mobility::OUParams kBase{1.0, 100.0, 0.0, 0.0};
const linkmodel::ConnectionModel kModel{50.0};

McConfig small_config(std::uint64_t n = 200'000) {
  McConfig c;
  c.n_samples = n;
  c.chains = 256;
  return c;
}

bool same_counts(const LinkCounts& a, const LinkCounts& b) {
  if (a.chains.size() != b.chains.size()) return false;
  for (std::size_t i = 0; i < a.chains.size(); ++i) {
    if (a.chains[i].states != b.chains[i].states) return false;
    if (a.chains[i].transitions != b.chains[i].transitions) return false;
    if (a.chains[i].triples != b.chains[i].triples) return false;
  }
  return true;
}

}  // namespace

TEST(SimulateLinkCounts, ReproducibleAndIndependentOfThreadCount) {
  McConfig c = small_config();
  const LinkCounts a = simulate_link_counts(c, 0.5, kBase, 10.0, kModel);
  const LinkCounts b = simulate_link_counts(c, 0.5, kBase, 10.0, kModel);
  c.threads = 4;
  const LinkCounts d = simulate_link_counts(c, 0.5, kBase, 10.0, kModel);
  EXPECT_TRUE(same_counts(a, b));
  EXPECT_TRUE(same_counts(a, d));
  c.seed += 1;
  EXPECT_FALSE(same_counts(a, simulate_link_counts(c, 0.5, kBase, 10.0, kModel)));
}

TEST(SimulateLinkCounts, TalliesAreConsistent) {
  const McConfig c = small_config(25'600);
  const ChainCounts t = simulate_link_counts(c, 1.0, kBase, 10.0, kModel).total();
  std::uint64_t trans = 0, trip = 0;
  for (auto v : t.transitions) trans += v;
  for (auto v : t.triples) trip += v;
  EXPECT_EQ(trans, 25'600u);
  EXPECT_EQ(t.states[0] + t.states[1], trans + c.chains);
  EXPECT_EQ(trip, trans - c.chains);
}

TEST(McEstimates, StandardErrorShrinksLikeRootN) {
  const auto a = empirical_transition(small_config(200'000), 1.0, kBase, 10.0, kModel);
  const auto b = empirical_transition(small_config(400'000), 1.0, kBase, 10.0, kModel);
  for (int r = 0; r < 2; ++r) {
    const double ratio = a.p[r][1].std_err / b.p[r][1].std_err;
    EXPECT_GE(ratio, 1.2) << "row " << r;
    EXPECT_LE(ratio, 1.7) << "row " << r;
  }
}

TEST(McEstimates, FrozenNodesNeverLeaveTheOnState) {
  const McConfig c = small_config(20'000);
  const LinkCounts counts = simulate_link_counts(c, 1.0, {1.0, 1e-9, 0.0, 0.0}, 10.0, kModel);
  const McTransition t = transition_estimates(counts);
  EXPECT_EQ(t.p[1][1].value, 1.0);
  EXPECT_EQ(t.p[1][0].value, 0.0);
  EXPECT_FALSE(t.sufficient[0]);
  EXPECT_TRUE(std::isnan(t.p[0][0].value));
  EXPECT_THROW(t.require_sufficient(), InsufficientCountError);
  EXPECT_EQ(entropy_rate_estimate(counts, c).value, 0.0);
  EXPECT_FALSE(mi_ratio_estimate(counts, c).has_value());
  EXPECT_THROW(compare(1.0, t.p[1][1]), DomainError);
}

TEST(McEstimates, LongLagRowsMatchStationaryLaw) {
  const McConfig c = small_config();
  const LinkCounts counts = simulate_link_counts(c, 100.0, kBase, 10.0, kModel);
  const McTransition t = transition_estimates(counts);
  const McEstimate pi = steady_state_estimate(counts);
  for (int b = 0; b < 2; ++b) EXPECT_NEAR(t.p[b][1].value, pi.value, 4.0 * t.p[b][1].std_err);
}

TEST(McEstimates, AgreeWithAnalyticalChain) {
  const McConfig c;  // one million transitions
  for (double dt : {0.5, 1.0}) {
    const auto chain = linkmodel::analyze_link(dt, kBase, 10.0, kModel, {}, {});
    const LinkCounts counts = simulate_link_counts(c, dt, kBase, 10.0, kModel);
    const McTransition t = transition_estimates(counts);
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a)
        EXPECT_LE(std::abs(compare(chain.transition.p[b][a], t.p[b][a])), 3.0) << "dt=" << dt << " " << b << a;
    const auto q = joint3_estimates(counts);
    double total = 0.0;
    for (int i = 0; i < 8; ++i) {
      total += q[i].value;
      EXPECT_LE(std::abs(compare(chain.joint.q[i >> 2][(i >> 1) & 1][i & 1], q[i])), 3.0)
          << "dt=" << dt << " cell " << i;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    // Stationary reversibility: P(0,b,1) = P(1,b,0) within sampling noise.
    for (int b = 0; b < 2; ++b) {
      const McEstimate& x = q[4 * 0 + 2 * b + 1];
      const McEstimate& y = q[4 * 1 + 2 * b + 0];
      EXPECT_LE(std::abs(x.value - y.value), 3.0 * std::hypot(x.std_err, y.std_err));
    }
  }
}

TEST(McEstimates, EntropyRateAgreesWithAnalytical) {
  const McConfig c;
  const mobility::OUParams ou{1.0, 50.0, 0.0, 0.0};
  const auto chain = linkmodel::analyze_link(1.0, ou, 10.0, kModel, {}, {});
  const McEstimate h = empirical_entropy_rate(c, 1.0, ou, 10.0, kModel);
  EXPECT_NEAR(h.value, linkmodel::entropy_rate(chain.transition), 0.02);
  EXPECT_GT(h.std_err, 0.0);

  const auto far = linkmodel::analyze_link(10.0, kBase, 10.0, kModel, {}, {});
  const McEstimate h10 = empirical_entropy_rate(c, 10.0, kBase, 10.0, kModel);
  EXPECT_NEAR(h10.value, linkmodel::marginal_entropy(far.transition.pi), 0.02);
}

TEST(Compare, Examples) {
  EXPECT_DOUBLE_EQ(compare(0.5, {0.4, 0.05, 10}), 2.0);
  EXPECT_DOUBLE_EQ(compare(0.4, {0.5, 0.1, 10}), -1.0);
  EXPECT_THROW(compare(0.5, {0.5, 0.0, 10}), DomainError);
}

TEST(McConfig, ValidationAndBurnIn) {
  McConfig c;
  EXPECT_EQ(c.effective_burn_in(0.5, 1.0), 0u);
  c.stationary_start = false;
  EXPECT_EQ(c.effective_burn_in(0.5, 1.0), 200u);
  c.burn_in = 7;
  EXPECT_EQ(c.effective_burn_in(0.5, 1.0), 7u);
  c.chains = 1;
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_THROW(simulate_link_counts(small_config(), 0.0, kBase, 10.0, kModel), DomainError);
}

TEST(CountsCsv, HeaderAndRows) {
  const LinkCounts counts = simulate_link_counts(small_config(10'000), 1.0, kBase, 10.0, kModel);
  std::ostringstream os;
  write_counts_csv(os, counts);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "state_prev,state_next,count");
  std::uint64_t sum = 0;
  int rows = 0;
  while (std::getline(is, line)) {
    sum += std::stoull(line.substr(line.rfind(',') + 1));
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(sum, 10'240u);  // rounded up to whole chains
}
