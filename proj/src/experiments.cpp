#include "linkstab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>

#include "linkstab/csv.hpp"
#include "linkstab/errors.hpp"
#include "linkstab/parallel.hpp"

namespace linkstab::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

mobility::OUParams ou_params(const GridPoint& p) {
  mobility::OUParams ou;
  ou.tau = p.tau;
  ou.sqrt_d = p.sqrt_d;
  return ou;
}

std::string cell(double v) { return csv::number(v); }

void append_mc(std::ostream& os, const std::optional<montecarlo::McEstimate>& e) {
  if (e)
    os << ',' << cell(e->value) << ',' << cell(e->std_err);
  else
    os << ",,";
}

ValidationRow make_row(const GridPoint& p, std::string quantity, double analytical,
                       const montecarlo::McEstimate& e) {
  ValidationRow row;
  row.point = p;
  row.quantity = std::move(quantity);
  row.analytical = analytical;
  row.mc = e.value;
  row.std_err = e.std_err;
  if (!std::isfinite(analytical)) {
    row.status = Status::Undefined;
    row.z = kNaN;
  } else if (!std::isfinite(e.value)) {
    row.status = Status::Insufficient;
    row.z = kNaN;
  } else if (!(e.std_err > 0.0)) {
    // Every chain saw the same ratio, so there is no spread to scale by.
    row.status = Status::Degenerate;
    row.z = kNaN;
  } else {
    row.z = montecarlo::compare(analytical, e);
    row.status = std::abs(row.z) <= kMaxAbsZ ? Status::Ok : Status::Fail;
  }
  return row;
}

}  // namespace

std::vector<GridPoint> expand_grid(const config::ExperimentConfig& c) {
  c.validate();
  std::vector<GridPoint> out;
  const std::vector<double> swept = c.grid.points();
  for (double sd : c.sqrt_d) {
    for (double v : swept) {
      GridPoint p{c.delta_t, c.tau, sd};
      switch (c.variable) {
        case config::SweepVariable::DeltaT: p.delta_t = v; break;
        case config::SweepVariable::SqrtD: p.sqrt_d = v; break;
        case config::SweepVariable::Tau: p.tau = v; break;
      }
      out.push_back(p);
    }
    if (c.variable == config::SweepVariable::SqrtD) break;
  }
  return out;
}

montecarlo::McConfig point_mc_config(const montecarlo::McConfig& base, std::size_t index) {
  montecarlo::McConfig mc = base;
  mc.seed = base.seed + index;
  return mc;
}

PointResult evaluate_point(const GridPoint& point, const config::ExperimentConfig& config,
                           const std::optional<montecarlo::McConfig>& mc) {
  const mobility::OUParams ou = ou_params(point);
  const linkmodel::ConnectionModel model = config.connection();

  PointResult r;
  r.point = point;
  r.chain = linkmodel::analyze_link(point.delta_t, ou, config.beta, model, config.trunc, config.quad);
  r.entropy_rate = linkmodel::entropy_rate(r.chain.transition);
  r.marginal_entropy = linkmodel::marginal_entropy(r.chain.transition.pi);
  r.mi = linkmodel::mutual_information(r.chain.joint);
  try {
    r.r_mi = linkmodel::mutual_info_ratio(r.chain.joint);
  } catch (const UndefinedRatioError&) {
    r.r_mi.reset();
  }

  if (mc) {
    const montecarlo::LinkCounts counts =
        montecarlo::simulate_link_counts(*mc, point.delta_t, ou, config.beta, model);
    McOverlay o;
    o.transition = montecarlo::transition_estimates(counts);
    o.steady_on = montecarlo::steady_state_estimate(counts);
    o.entropy_rate = montecarlo::entropy_rate_estimate(counts, *mc);
    o.r_mi = montecarlo::mi_ratio_estimate(counts, *mc);
    r.mc = o;
  }
  return r;
}

std::vector<PointResult> run_sweep(const config::ExperimentConfig& config, unsigned jobs, bool with_mc,
                                   std::ostream* warn) {
  const std::vector<GridPoint> grid = expand_grid(config);
  std::vector<PointResult> results(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  jobs = std::max(1u, jobs);
  // Spare workers go to the chains of each point once points run out.
  const unsigned inner = std::max<unsigned>(1, jobs / static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1)));

  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    try {
      std::optional<montecarlo::McConfig> mc;
      if (with_mc) {
        mc = point_mc_config(config.mc, i);
        mc->threads = inner;
      }
      results[i] = evaluate_point(grid[i], config, mc);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (warn)
    for (const auto& r : results)
      if (!r.r_mi)
        *warn << "warning: R_MI undefined at delta_t=" << cell(r.point.delta_t) << " tau=" << cell(r.point.tau)
              << " sqrt_d=" << cell(r.point.sqrt_d) << " (I(L3; L1, L2) below 1e-12 bits)\n";
  return results;
}

void write_csv(std::ostream& os, Table table, const std::vector<PointResult>& results) {
  const bool with_mc = !results.empty() && results.front().mc.has_value();
  switch (table) {
    case Table::MutualInfo: os << "delta_t,sqrt_d,r_mi"; break;
    case Table::EntropyVsDt: os << "delta_t,sqrt_d,entropy_rate,marginal_entropy"; break;
    case Table::EntropyVsD: os << "sqrt_d,entropy_rate"; break;
    case Table::EntropyVsTau: os << "tau,entropy_rate"; break;
  }
  if (with_mc) os << (table == Table::MutualInfo ? ",r_mi_mc,r_mi_mc_se" : ",entropy_rate_mc,entropy_rate_mc_se");
  os << '\n';

  for (const auto& r : results) {
    const GridPoint& p = r.point;
    switch (table) {
      case Table::MutualInfo:
        os << cell(p.delta_t) << ',' << cell(p.sqrt_d) << ',' << (r.r_mi ? cell(*r.r_mi) : std::string());
        break;
      case Table::EntropyVsDt:
        os << cell(p.delta_t) << ',' << cell(p.sqrt_d) << ',' << cell(r.entropy_rate) << ','
           << cell(r.marginal_entropy);
        break;
      case Table::EntropyVsD: os << cell(p.sqrt_d) << ',' << cell(r.entropy_rate); break;
      case Table::EntropyVsTau: os << cell(p.tau) << ',' << cell(r.entropy_rate); break;
    }
    if (with_mc && r.mc) {
      if (table == Table::MutualInfo)
        append_mc(os, r.mc->r_mi);
      else
        append_mc(os, r.mc->entropy_rate);
    }
    os << '\n';
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Fail: return "fail";
    case Status::Undefined: return "undefined";
    case Status::Insufficient: return "insufficient";
    case Status::Degenerate: return "degenerate";
    case Status::Unresolved: return "unresolved";
  }
  return {};
}

std::vector<ValidationRow> validation_rows(const PointResult& r) {
  if (!r.mc) throw DomainError("validation_rows: point has no Monte Carlo results");
  const McOverlay& mc = *r.mc;
  const auto& t = r.chain.transition;
  std::vector<ValidationRow> rows;
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a)
      rows.push_back(make_row(r.point, "p" + std::to_string(b) + std::to_string(a), t.p[b][a], mc.transition.p[b][a]));
  rows.push_back(make_row(r.point, "steady_on", t.pi[1], mc.steady_on));

  ValidationRow h = make_row(r.point, "entropy_rate", r.entropy_rate, mc.entropy_rate);
  if (h.status == Status::Ok && std::abs(h.analytical - h.mc) >= kMaxEntropyGapBits) h.status = Status::Fail;
  rows.push_back(h);

  const montecarlo::McEstimate missing{kNaN, kNaN, 0};
  ValidationRow q = make_row(r.point, "r_mi", r.r_mi.value_or(kNaN), mc.r_mi.value_or(missing));
  if (r.r_mi && r.mi.with_past < kMinResolvableInformationBits &&
      (q.status == Status::Ok || q.status == Status::Fail))
    q.status = Status::Unresolved;
  rows.push_back(q);
  return rows;
}

bool passed(const std::vector<ValidationRow>& rows) {
  for (const auto& r : rows)
    if (r.status == Status::Fail) return false;
  return true;
}

void write_validation_csv(std::ostream& os, const std::vector<ValidationRow>& rows) {
  os << "delta_t,tau,sqrt_d,quantity,analytical,mc,std_err,z,status\n";
  for (const auto& r : rows)
    os << cell(r.point.delta_t) << ',' << cell(r.point.tau) << ',' << cell(r.point.sqrt_d) << ',' << r.quantity
       << ',' << cell(r.analytical) << ',' << cell(r.mc) << ',' << cell(r.std_err) << ',' << cell(r.z) << ','
       << to_string(r.status) << '\n';
}

}  // namespace linkstab::experiments
