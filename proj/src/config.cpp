#include "linkstab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "linkstab/errors.hpp"

namespace linkstab::config {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Shortest representation that parses back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError("config: '" + key + "' expects a number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& key) {
  const std::string s = trim(text);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError("config: '" + key + "' expects an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& key) {
  const long long v = parse_int(text, key);
  if (v < 0) throw DomainError("config: '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string s = trim(text);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw DomainError("config: '" + key + "' expects true or false, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
  if (out.empty()) throw DomainError("config: '" + key + "' is empty");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += exact(v[i]);
  }
  return s;
}

}  // namespace

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::DeltaT: return "delta_t";
    case SweepVariable::SqrtD: return "sqrt_d";
    case SweepVariable::Tau: return "tau";
  }
  return {};
}

SweepVariable parse_sweep_variable(const std::string& name) {
  const std::string s = trim(name);
  if (s == "delta_t") return SweepVariable::DeltaT;
  if (s == "sqrt_d") return SweepVariable::SqrtD;
  if (s == "tau") return SweepVariable::Tau;
  throw DomainError("config: unknown sweep variable '" + s + "' (delta_t, sqrt_d or tau)");
}

GridSpec GridSpec::list(std::vector<double> v) {
  GridSpec g;
  g.kind = Kind::List;
  g.values = std::move(v);
  return g;
}

GridSpec GridSpec::linspace(double lo, double hi, int n) {
  GridSpec g;
  g.kind = Kind::Linear;
  g.lo = lo;
  g.hi = hi;
  g.count = n;
  return g;
}

GridSpec GridSpec::logspace(double lo, double hi, int n) {
  GridSpec g = linspace(lo, hi, n);
  g.kind = Kind::Log;
  return g;
}

std::vector<double> GridSpec::points() const {
  if (kind == Kind::List) return values;
  if (count < 1) throw DomainError("grid: point count must be >= 1");
  if (kind == Kind::Log && !(lo > 0.0 && hi > 0.0)) throw DomainError("grid: logspace bounds must be > 0");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    if (kind == Kind::Linear)
      out[i] = lo + t * (hi - lo);
    else
      out[i] = lo * std::pow(hi / lo, t);
  }
  // Pin the end points against rounding.
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::string GridSpec::to_string() const {
  switch (kind) {
    case Kind::List: return join(values);
    case Kind::Linear: return "linspace(" + exact(lo) + ", " + exact(hi) + ", " + std::to_string(count) + ")";
    case Kind::Log: return "logspace(" + exact(lo) + ", " + exact(hi) + ", " + std::to_string(count) + ")";
  }
  return {};
}

GridSpec GridSpec::parse(const std::string& text) {
  const std::string s = trim(text);
  for (auto [name, kind] : {std::pair{"linspace", Kind::Linear}, std::pair{"logspace", Kind::Log}}) {
    const std::string prefix = std::string(name) + "(";
    if (s.rfind(prefix, 0) != 0) continue;
    if (s.back() != ')') throw DomainError("grid: missing ')' in '" + s + "'");
    const std::string args = s.substr(prefix.size(), s.size() - prefix.size() - 1);
    std::vector<std::string> parts;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 3) throw DomainError("grid: " + std::string(name) + " takes (lo, hi, n)");
    GridSpec g;
    g.kind = kind;
    g.lo = parse_double(parts[0], "grid");
    g.hi = parse_double(parts[1], "grid");
    g.count = static_cast<int>(parse_int(parts[2], "grid"));
    g.points();  // rejects bad bounds and counts now rather than at sweep time
    return g;
  }
  return list(parse_list(s, "grid"));
}

linkmodel::ConnectionModel ExperimentConfig::connection() const {
  if (r0) return {*r0};
  if (psi && gamma0 && eta) return linkmodel::ConnectionModel::from_link_budget(*psi, *gamma0, *eta);
  throw DomainError("config: [link] needs r0 or all of psi, gamma0, eta");
}

void ExperimentConfig::validate() const {
  if (!(tau > 0.0)) throw DomainError("config: tau must be > 0");
  if (!(beta >= 0.0)) throw DomainError("config: beta must be >= 0");
  if (!(delta_t > 0.0)) throw DomainError("config: delta_t must be > 0");
  if (sqrt_d.empty()) throw DomainError("config: sqrt_d is empty");
  for (double v : sqrt_d)
    if (!(v > 0.0)) throw DomainError("config: sqrt_d values must be > 0");
  if (sqrt_d.size() > 1 && variable != SweepVariable::DeltaT)
    throw DomainError("config: a list of sqrt_d values is only allowed when sweeping delta_t");
  const bool any_budget = psi || gamma0 || eta;
  if (r0 && any_budget) throw DomainError("config: give either r0 or the link budget, not both");
  connection().validate();

  const std::vector<double> pts = grid.points();
  if (pts.empty()) throw DomainError("config: sweep grid is empty");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i] > 0.0)) throw DomainError("config: sweep grid values must be > 0");
    if (i > 0 && !(pts[i] > pts[i - 1])) throw DomainError("config: sweep grid must be strictly increasing");
  }
  trunc.validate();
  quad.validate();
  if (mc_enabled) mc.validate();
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  switch (e) {
    case Experiment::MutualInfo:
    case Experiment::EntropyVsDt:
      c.variable = SweepVariable::DeltaT;
      c.grid = GridSpec::logspace(0.05, 10.0, 30);
      c.sqrt_d = {50.0, 100.0, 200.0};
      break;
    case Experiment::EntropyVsD:
      c.variable = SweepVariable::SqrtD;
      c.grid = GridSpec::linspace(10.0, 200.0, 20);
      break;
    case Experiment::EntropyVsTau:
      c.variable = SweepVariable::Tau;
      c.grid = GridSpec::logspace(0.05, 10.0, 30);
      c.sqrt_d = {50.0};
      break;
  }
  return c;
}

ExperimentConfig parse(std::istream& is) {
  ExperimentConfig c;
  // The link section replaces the default r0 as a whole.
  bool link_seen = false;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw DomainError("config line " + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "link" && !link_seen) {
        link_seen = true;
        c.r0.reset();
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where = section + "." + key;

    if (section == "mobility") {
      if (key == "tau") c.tau = parse_double(value, where);
      else if (key == "sqrt_d") c.sqrt_d = parse_list(value, where);
      else if (key == "beta") c.beta = parse_double(value, where);
      else throw DomainError("config: unknown key " + where);
    } else if (section == "sampling") {
      if (key == "delta_t") c.delta_t = parse_double(value, where);
      else throw DomainError("config: unknown key " + where);
    } else if (section == "link") {
      if (key == "r0") c.r0 = parse_double(value, where);
      else if (key == "psi") c.psi = parse_double(value, where);
      else if (key == "gamma0") c.gamma0 = parse_double(value, where);
      else if (key == "eta") c.eta = parse_double(value, where);
      else throw DomainError("config: unknown key " + where);
    } else if (section == "sweep") {
      if (key == "variable") c.variable = parse_sweep_variable(value);
      else if (key == "grid") c.grid = GridSpec::parse(value);
      else throw DomainError("config: unknown key " + where);
    } else if (section == "numerics") {
      if (key == "max_q") c.trunc.max_q = static_cast<int>(parse_int(value, where));
      else if (key == "max_p") c.trunc.max_p = static_cast<int>(parse_int(value, where));
      else if (key == "term_rel_tol") c.trunc.term_rel_tol = parse_double(value, where);
      else if (key == "quiet_run") c.trunc.quiet_run = static_cast<int>(parse_int(value, where));
      else if (key == "nodes_per_panel") c.quad.nodes_per_panel = static_cast<int>(parse_int(value, where));
      else if (key == "panels_per_dim") c.quad.panels_per_dim = static_cast<int>(parse_int(value, where));
      else if (key == "tail_cutoff_sigmas") c.quad.tail_cutoff_sigmas = parse_double(value, where);
      else throw DomainError("config: unknown key " + where);
    } else if (section == "mc") {
      if (key == "enabled") c.mc_enabled = parse_bool(value, where);
      else if (key == "n_samples") c.mc.n_samples = parse_unsigned(value, where);
      else if (key == "burn_in") {
        if (value == "auto") c.mc.burn_in.reset();
        else c.mc.burn_in = parse_unsigned(value, where);
      } else if (key == "seed") c.mc.seed = parse_unsigned(value, where);
      else if (key == "stationary_start") c.mc.stationary_start = parse_bool(value, where);
      else if (key == "chains") c.mc.chains = static_cast<std::uint32_t>(parse_unsigned(value, where));
      else if (key == "bootstrap_resamples")
        c.mc.bootstrap_resamples = static_cast<std::uint32_t>(parse_unsigned(value, where));
      else throw DomainError("config: unknown key " + where);
    } else if (section == "output") {
      if (key == "path") c.output = value;
      else throw DomainError("config: unknown key " + where);
    } else {
      throw DomainError("config line " + std::to_string(line_no) + ": key outside a known section");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open '" + path + "'");
  return parse(in);
}

void serialize(std::ostream& os, const ExperimentConfig& c) {
  os << "[mobility]\n"
     << "tau = " << exact(c.tau) << "  # s\n"
     << "sqrt_d = " << join(c.sqrt_d) << "  # m/sqrt(s)\n"
     << "beta = " << exact(c.beta) << "  # m\n\n"
     << "[sampling]\n"
     << "delta_t = " << exact(c.delta_t) << "  # s\n\n"
     << "[link]\n";
  if (c.r0) os << "r0 = " << exact(*c.r0) << "  # m\n";
  if (c.psi) os << "psi = " << exact(*c.psi) << "\n";
  if (c.gamma0) os << "gamma0 = " << exact(*c.gamma0) << "\n";
  if (c.eta) os << "eta = " << exact(*c.eta) << "\n";
  os << "\n[sweep]\n"
     << "variable = " << to_string(c.variable) << "\n"
     << "grid = " << c.grid.to_string() << "\n\n"
     << "[numerics]\n"
     << "max_q = " << c.trunc.max_q << "\n"
     << "max_p = " << c.trunc.max_p << "\n"
     << "term_rel_tol = " << exact(c.trunc.term_rel_tol) << "\n"
     << "quiet_run = " << c.trunc.quiet_run << "\n"
     << "nodes_per_panel = " << c.quad.nodes_per_panel << "\n"
     << "panels_per_dim = " << c.quad.panels_per_dim << "\n"
     << "tail_cutoff_sigmas = " << exact(c.quad.tail_cutoff_sigmas) << "\n\n"
     << "[mc]\n"
     << "enabled = " << (c.mc_enabled ? "true" : "false") << "\n"
     << "n_samples = " << c.mc.n_samples << "\n"
     << "burn_in = " << (c.mc.burn_in ? std::to_string(*c.mc.burn_in) : std::string("auto")) << "\n"
     << "seed = " << c.mc.seed << "\n"
     << "stationary_start = " << (c.mc.stationary_start ? "true" : "false") << "\n"
     << "chains = " << c.mc.chains << "\n"
     << "bootstrap_resamples = " << c.mc.bootstrap_resamples << "\n";
  if (!c.output.empty()) os << "\n[output]\npath = " << c.output << "\n";
}

bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto& ta = a.trunc;
  const auto& tb = b.trunc;
  const auto& qa = a.quad;
  const auto& qb = b.quad;
  const auto& ma = a.mc;
  const auto& mb = b.mc;
  return a.tau == b.tau && a.sqrt_d == b.sqrt_d && a.beta == b.beta && a.delta_t == b.delta_t &&
         a.r0 == b.r0 && a.psi == b.psi && a.gamma0 == b.gamma0 && a.eta == b.eta &&
         a.variable == b.variable && a.grid.points() == b.grid.points() && ta.max_q == tb.max_q &&
         ta.max_p == tb.max_p && ta.term_rel_tol == tb.term_rel_tol && ta.quiet_run == tb.quiet_run &&
         qa.nodes_per_panel == qb.nodes_per_panel && qa.panels_per_dim == qb.panels_per_dim &&
         qa.tail_cutoff_sigmas == qb.tail_cutoff_sigmas && a.mc_enabled == b.mc_enabled &&
         ma.n_samples == mb.n_samples && ma.burn_in == mb.burn_in && ma.seed == mb.seed &&
         ma.stationary_start == mb.stationary_start && ma.chains == mb.chains &&
         ma.bootstrap_resamples == mb.bootstrap_resamples && a.output == b.output;
}

}  // namespace linkstab::config
