#include "varconstrain/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "varconstrain/errors.hpp"

namespace varconstrain {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(out)) {
    throw UsageError("config: " + key + " expects a number, got '" + v + "'");
  }
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw UsageError("config: " + key + " expects an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw UsageError("config: " + key + " expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

int to_small(const std::string& key, const std::string& v) {
  const auto x = to_int(key, v);
  if (x < 1 || x > 100000) throw UsageError("config: " + key + " out of range: " + v);
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config: " + key + " expects true or false, got '" + v + "'");
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig preset_config(const std::string& problem, Method method, const std::string& preset) {
  if (preset == "antipodal") {
    // Desk-scale geodesic between opposite points.
    if (problem != "geodesic") throw UsageError("preset antipodal only applies to geodesic");
    RunConfig c = preset_config(problem, method, "desk");
    c.quad.theta0 = std::numbers::pi / 4;
    c.quad.phi0 = 0.0;
    c.quad.theta1 = 3 * std::numbers::pi / 4;
    c.quad.phi1 = std::numbers::pi;
    return c;
  }
  if (preset != "paper" && preset != "desk") {
    throw UsageError("unknown preset '" + preset + "' (expected paper, desk or antipodal)");
  }
  const bool paper = preset == "paper";
  RunConfig c;
  c.problem = problem;
  c.method = method;
  if (problem == "minimal-surface") {
    c.E = paper ? 20000 : 4000;
    c.P = paper ? 1000 : 200;
    c.penalty = {100.0, 1.01, 5000.0};
    c.L0 = 1e-4;
    c.D0 = method == Method::kPenalty ? 1e-1 : 2e-1;
    c.solution = NetworkSpec::parse("FF(50,3,2,1)");
    c.multiplier = NetworkSpec::parse("FF(50,3,1,1)");
    c.quad.n2d = paper ? 32 : 16;
    c.quad.n1d = paper ? 64 : 32;
  } else if (problem == "geodesic") {
    c.E = paper ? 50000 : 5000;
    c.P = paper ? 2500 : 250;
    c.penalty = {100.0, 1.01, 500.0};
    c.L0 = 1e-3;
    c.D0 = 1e-1;
    c.L1 = 1e-4;
    c.D1 = 1e-2;
    c.solution = NetworkSpec::parse("LSTM(50,3,1,1)");
    c.quad.n1d = 64;
  } else if (problem == "grad-shafranov") {
    c.E = paper ? 50000 : 4000;
    c.P = paper ? 2500 : 200;
    c.penalty = {100.0, 1.01, 1000.0};
    c.L0 = 1e-4;
    c.D0 = 1e-1;
    c.L1 = 1e-6;
    c.D1 = 1e-2;
    c.solution = NetworkSpec::parse(paper ? "LSTM(50,3,2,1)" : "LSTM(20,3,2,1)");
    c.multiplier = NetworkSpec::parse("FF(50,3,2,1)");
    c.quad.n2d = paper ? 32 : 12;
    c.quad.nface = paper ? 16 : 12;
  } else if (problem == "beltrami") {
    c.E = paper ? 50000 : 2000;
    c.P = paper ? 2500 : 100;
    c.penalty = {100.0, 1.01, 5000.0};
    c.L0 = 1e-4;
    c.D0 = 1e-1;
    c.solution = NetworkSpec::parse(paper ? "LSTM(50,3,3,3)" : "LSTM(20,3,3,3)");
    c.multiplier = NetworkSpec::parse(paper ? "FF(50,3,3,3)" : "FF(20,3,3,3)");
    c.quad.mc_points = 1000;
    c.quad.nface = paper ? 16 : 6;
    c.quad.eval_n3d = paper ? 16 : 8;
  } else {
    throw UsageError("unknown problem '" + problem +
                     "' (expected minimal-surface, geodesic, grad-shafranov or beltrami)");
  }
  return c;
}

Settings parse_settings(std::string_view text) {
  Settings out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value, got '" +
                       t + "'");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_settings(ss.str());
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& v) {
  if (key == "problem") {
    c.problem = v;
  } else if (key == "method") {
    c.method = parse_method(v);
  } else if (key == "E") {
    c.E = to_int(key, v);
  } else if (key == "P") {
    c.P = to_int(key, v);
  } else if (key == "Q") {
    c.q = to_int(key, v);
  } else if (key == "penalty.mu1") {
    c.penalty.mu1 = to_double(key, v);
  } else if (key == "penalty.r") {
    c.penalty.r = to_double(key, v);
  } else if (key == "penalty.mu_max") {
    c.penalty.mu_max = to_double(key, v);
  } else if (key == "lr.L0") {
    c.L0 = to_double(key, v);
  } else if (key == "lr.D0") {
    c.D0 = to_double(key, v);
  } else if (key == "lr.L1") {
    c.L1 = v == "none" ? std::nullopt : std::optional<double>(to_double(key, v));
  } else if (key == "lr.D1") {
    c.D1 = v == "none" ? std::nullopt : std::optional<double>(to_double(key, v));
  } else if (key == "adam.beta1") {
    c.beta1 = to_double(key, v);
  } else if (key == "adam.beta2") {
    c.beta2 = to_double(key, v);
  } else if (key == "adam.eps") {
    c.eps = to_double(key, v);
  } else if (key == "quad.n1d") {
    c.quad.n1d = to_small(key, v);
  } else if (key == "quad.n2d") {
    c.quad.n2d = to_small(key, v);
  } else if (key == "quad.nface") {
    c.quad.nface = to_small(key, v);
  } else if (key == "quad.eval_n3d") {
    c.quad.eval_n3d = to_small(key, v);
  } else if (key == "quad.mc_points") {
    c.quad.mc_points = static_cast<std::size_t>(to_small(key, v));
  } else if (key == "quad.mc_seed") {
    c.quad.mc_seed = to_uint(key, v);
  } else if (key == "quad.mc_resample") {
    c.mc_resample = to_bool(key, v);
  } else if (key == "geodesic.theta0") {
    c.quad.theta0 = to_double(key, v);
  } else if (key == "geodesic.phi0") {
    c.quad.phi0 = to_double(key, v);
  } else if (key == "geodesic.theta1") {
    c.quad.theta1 = to_double(key, v);
  } else if (key == "geodesic.phi1") {
    c.quad.phi1 = to_double(key, v);
  } else if (key == "z_norm") {
    c.quad.z_norm = to_double(key, v);
  } else if (key == "arch.solution") {
    c.solution = NetworkSpec::parse(v);
  } else if (key == "arch.multiplier") {
    c.multiplier = NetworkSpec::parse(v);
  } else if (key == "al.unscaled_update") {
    c.unscaled_update = to_bool(key, v);
  } else if (key == "seed") {
    c.seed = to_uint(key, v);
  } else if (key == "log_every") {
    c.log_every = to_int(key, v);
  } else if (key == "checkpoint_every") {
    c.checkpoint_every = to_int(key, v);
  } else {
    throw UsageError("config: unknown key '" + key + "'");
  }
}

void apply_settings(RunConfig& config, const Settings& settings) {
  for (const auto& [k, v] : settings) apply_setting(config, k, v);
}

Settings to_settings(const RunConfig& c) {
  Settings s{
      {"problem", c.problem},
      {"method", method_name(c.method)},
      {"E", std::to_string(c.E)},
      {"P", std::to_string(c.P)},
      {"Q", std::to_string(c.P > 0 ? c.E / c.P : 0)},
      {"penalty.mu1", num(c.penalty.mu1)},
      {"penalty.r", num(c.penalty.r)},
      {"penalty.mu_max", num(c.penalty.mu_max)},
      {"lr.L0", num(c.L0)},
      {"lr.D0", num(c.D0)},
      {"lr.L1", c.L1 ? num(*c.L1) : "none"},
      {"lr.D1", c.D1 ? num(*c.D1) : "none"},
      {"adam.beta1", num(c.beta1)},
      {"adam.beta2", num(c.beta2)},
      {"adam.eps", num(c.eps)},
      {"quad.n1d", std::to_string(c.quad.n1d)},
      {"quad.n2d", std::to_string(c.quad.n2d)},
      {"quad.nface", std::to_string(c.quad.nface)},
      {"quad.eval_n3d", std::to_string(c.quad.eval_n3d)},
      {"quad.mc_points", std::to_string(c.quad.mc_points)},
      {"quad.mc_seed", std::to_string(c.quad.mc_seed)},
      {"quad.mc_resample", c.mc_resample ? "true" : "false"},
      {"geodesic.theta0", num(c.quad.theta0)},
      {"geodesic.phi0", num(c.quad.phi0)},
      {"geodesic.theta1", num(c.quad.theta1)},
      {"geodesic.phi1", num(c.quad.phi1)},
      {"z_norm", num(c.quad.z_norm)},
      {"arch.solution", c.solution.to_string()},
      {"arch.multiplier", c.multiplier.to_string()},
      {"al.unscaled_update", c.unscaled_update ? "true" : "false"},
      {"seed", std::to_string(c.seed)},
      {"log_every", std::to_string(c.log_every)},
      {"checkpoint_every", std::to_string(c.checkpoint_every)},
  };
  return s;
}

std::string format_settings(const Settings& settings) {
  std::string out;
  for (const auto& [k, v] : settings) out += k + " = " + v + "\n";
  return out;
}

SolverConfig solver_config(const RunConfig& c) {
  if (c.E <= 0 || c.P <= 0) throw UsageError("config: E and P must be positive");
  if (c.E % c.P != 0) {
    throw UsageError("config: P = " + std::to_string(c.P) + " does not divide E = " +
                     std::to_string(c.E));
  }
  if (c.q && *c.q * c.P != c.E) {
    throw UsageError("config: Q = " + std::to_string(*c.q) + " is inconsistent with E = " +
                     std::to_string(c.E) + " and P = " + std::to_string(c.P) + " (Q is E / P)");
  }
  SolverConfig s;
  s.method = c.method;
  s.E = c.E;
  s.P = c.P;
  s.penalty = c.penalty;
  s.penalty.validate();
  s.lr = make_lr_schedule(c.L0, c.D0, c.L1, c.D1, c.E, c.P, c.penalty);
  s.beta1 = c.beta1;
  s.beta2 = c.beta2;
  s.eps = c.eps;
  s.solution = c.solution;
  s.multiplier = c.multiplier;
  s.seed = c.seed;
  s.log_every = c.log_every;
  s.unscaled_update = c.unscaled_update;
  s.mc_resample = c.mc_resample;
  s.mc_seed = c.quad.mc_seed;
  return s;
}

void validate(const RunConfig& config) {
  if (config.checkpoint_every <= 0) throw UsageError("config: checkpoint_every must be positive");
  if (config.quad.z_norm < 0) throw UsageError("config: z_norm must be positive (0 keeps the default)");
  const auto problem = make_problem(config.problem, config.quad);
  solver_config(config).validate(*problem);
}

}  // namespace varconstrain
