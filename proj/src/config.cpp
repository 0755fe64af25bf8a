#include "honls/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace honls::config {

namespace {

constexpr const char* kHeader = "honls-config v1";

[[noreturn]] void fail(const std::string& msg) { throw ConfigError{msg}; }

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

long long parse_ll(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) fail(key + ": not an integer: '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(key + ": not an integer: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_ll(key, v);
  if (x < -2147483647LL || x > 2147483647LL) fail(key + ": out of range");
  return static_cast<int>(x);
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(key + ": not a number: '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(key + ": not a number: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size() || v[0] == '-')
      fail(key + ": not an unsigned integer: '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(key + ": not an unsigned integer: '" + v + "'");
  }
}

phase::Rat parse_rat(const std::string& key, const std::string& v) {
  mpq_class q;
  if (v.empty() || q.set_str(v, 10) != 0)
    fail(key + ": not a rational: '" + v + "'");
  q.canonicalize();
  return q;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

spectral::EquationSpec RunConfig::equation_spec() const {
  if (!weights.empty())
    return spectral::EquationSpec(phase::MixedOrderWeights(weights), sign);
  if (order < 1 || order > 8)
    fail("equation.order: must be in 1..8");
  return spectral::EquationSpec::pure(static_cast<unsigned>(order), sign);
}

nfr::NfrConfig RunConfig::nfr_config() const {
  nfr::NfrConfig c;
  c.N = N;
  c.J = J;
  c.K = K;
  c.quad_rule = quad_rule;
  c.contraction_tol = tol;
  c.max_iter = max_iter;
  c.term_budget = term_budget;
  c.validate();
  return c;
}

norms::NormSpec RunConfig::norm_spec() const { return norms::NormSpec(q, s); }

spectral::CoefficientState RunConfig::initial_state() const {
  spectral::CoefficientState state(K);
  for (const ModeAmplitude& m : init_modes) {
    if (m.n < -K || m.n > K)
      fail("init.modes: mode outside [-K, K]");
    state.at(m.n) = spectral::Complex(m.re, m.im);
  }
  return state;
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  bool saw_header = false;
  std::map<std::string, bool> seen;
  const std::map<std::string, std::function<void(const std::string&)>>
      setters = {
          {"equation.order",
           [&](const std::string& v) { cfg.order = parse_int("equation.order", v); }},
          {"equation.weights",
           [&](const std::string& v) {
             cfg.weights.clear();
             for (const std::string& w : split(v, ','))
               cfg.weights.push_back(parse_rat("equation.weights", w));
           }},
          {"equation.sign",
           [&](const std::string& v) {
             cfg.sign = parse_int("equation.sign", v);
             if (cfg.sign != 1 && cfg.sign != -1)
               fail("equation.sign: must be 1 or -1");
           }},
          {"solver.N",
           [&](const std::string& v) { cfg.N = parse_ll("solver.N", v); }},
          {"solver.J",
           [&](const std::string& v) { cfg.J = parse_int("solver.J", v); }},
          {"solver.K",
           [&](const std::string& v) { cfg.K = parse_ll("solver.K", v); }},
          {"solver.T",
           [&](const std::string& v) { cfg.T = parse_double("solver.T", v); }},
          {"solver.dt",
           [&](const std::string& v) { cfg.dt = parse_double("solver.dt", v); }},
          {"solver.panels",
           [&](const std::string& v) {
             cfg.panels = parse_ll("solver.panels", v);
           }},
          {"solver.quad_rule",
           [&](const std::string& v) {
             cfg.quad_rule = parse_int("solver.quad_rule", v);
           }},
          {"solver.tol",
           [&](const std::string& v) { cfg.tol = parse_double("solver.tol", v); }},
          {"solver.max_iter",
           [&](const std::string& v) {
             cfg.max_iter = parse_int("solver.max_iter", v);
           }},
          {"solver.term_budget",
           [&](const std::string& v) {
             cfg.term_budget = parse_ll("solver.term_budget", v);
           }},
          {"norms.q",
           [&](const std::string& v) { cfg.q = parse_double("norms.q", v); }},
          {"norms.s",
           [&](const std::string& v) { cfg.s = parse_double("norms.s", v); }},
          {"census.n",
           [&](const std::string& v) { cfg.census_n = parse_ll("census.n", v); }},
          {"census.grid",
           [&](const std::string& v) {
             cfg.census_grid.clear();
             for (const std::string& w : split(v, ','))
               cfg.census_grid.push_back(parse_ll("census.grid", w));
           }},
          {"census.K",
           [&](const std::string& v) { cfg.census_K = parse_ll("census.K", v); }},
          {"tree.J",
           [&](const std::string& v) { cfg.tree_J = parse_int("tree.J", v); }},
          {"probe.lemma",
           [&](const std::string& v) { cfg.probe_lemma = v; }},
          {"probe.samples",
           [&](const std::string& v) {
             cfg.probe_samples = parse_int("probe.samples", v);
           }},
          {"init.modes",
           [&](const std::string& v) {
             cfg.init_modes.clear();
             if (trim(v).empty()) return;
             for (const std::string& w : split(v, ',')) {
               const std::vector<std::string> parts = split(w, ':');
               if (parts.size() != 3)
                 fail("init.modes: expected n:re:im, got '" + w + "'");
               ModeAmplitude m;
               m.n = parse_ll("init.modes", parts[0]);
               m.re = parse_double("init.modes", parts[1]);
               m.im = parse_double("init.modes", parts[2]);
               cfg.init_modes.push_back(m);
             }
           }},
          {"seed", [&](const std::string& v) { cfg.seed = parse_u64("seed", v); }},
          {"output_dir", [&](const std::string& v) { cfg.output_dir = v; }},
      };

  while (std::getline(is, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kHeader)
        fail("missing or unrecognized header line (expected '" +
             std::string(kHeader) + "')");
      saw_header = true;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail("malformed line (no '='): " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail("unknown key: " + key);
    if (seen[key]) fail("duplicate key: " + key);
    seen[key] = true;
    it->second(value);
  }
  if (!saw_header) fail("empty config (missing header line)");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail("cannot open config file: " + path);
  return parse_config(is);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << kHeader << "\n";
  os << "equation.order = " << cfg.order << "\n";
  if (!cfg.weights.empty()) {
    os << "equation.weights = ";
    for (size_t i = 0; i < cfg.weights.size(); ++i)
      os << (i ? "," : "") << cfg.weights[i].get_str();
    os << "\n";
  }
  os << "equation.sign = " << cfg.sign << "\n";
  os << "solver.N = " << cfg.N << "\n";
  os << "solver.J = " << cfg.J << "\n";
  os << "solver.K = " << cfg.K << "\n";
  os << "solver.T = " << format_double(cfg.T) << "\n";
  os << "solver.dt = " << format_double(cfg.dt) << "\n";
  os << "solver.panels = " << cfg.panels << "\n";
  os << "solver.quad_rule = " << cfg.quad_rule << "\n";
  os << "solver.tol = " << format_double(cfg.tol) << "\n";
  os << "solver.max_iter = " << cfg.max_iter << "\n";
  os << "solver.term_budget = " << cfg.term_budget << "\n";
  os << "norms.q = " << format_double(cfg.q) << "\n";
  os << "norms.s = " << format_double(cfg.s) << "\n";
  os << "census.n = " << cfg.census_n << "\n";
  os << "census.grid = ";
  for (size_t i = 0; i < cfg.census_grid.size(); ++i)
    os << (i ? "," : "") << cfg.census_grid[i];
  os << "\n";
  os << "census.K = " << cfg.census_K << "\n";
  os << "tree.J = " << cfg.tree_J << "\n";
  os << "probe.lemma = " << cfg.probe_lemma << "\n";
  os << "probe.samples = " << cfg.probe_samples << "\n";
  if (!cfg.init_modes.empty()) {
    os << "init.modes = ";
    for (size_t i = 0; i < cfg.init_modes.size(); ++i) {
      const ModeAmplitude& m = cfg.init_modes[i];
      os << (i ? "," : "") << m.n << ":" << format_double(m.re) << ":"
         << format_double(m.im);
    }
    os << "\n";
  }
  os << "seed = " << cfg.seed << "\n";
  os << "output_dir = " << cfg.output_dir << "\n";
  return os.str();
}

}  // namespace honls::config
