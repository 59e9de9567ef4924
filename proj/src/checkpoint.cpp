#include "varconstrain/checkpoint.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "varconstrain/errors.hpp"

namespace varconstrain {

using nlohmann::json;

namespace {

json adam_json(const AdamState& a) {
  return {{"m", a.m}, {"v", a.v}, {"t", a.t}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"eps", a.eps}};
}

AdamState adam_from(const json& j) {
  AdamState a;
  a.m = j.at("m").get<std::vector<double>>();
  a.v = j.at("v").get<std::vector<double>>();
  a.t = j.at("t").get<std::int64_t>();
  a.beta1 = j.at("beta1").get<double>();
  a.beta2 = j.at("beta2").get<double>();
  a.eps = j.at("eps").get<double>();
  return a;
}

json net_json(const Network& n) { return {{"spec", n.spec.to_string()}, {"params", n.params}}; }

Network net_from(const json& j, const char* what) {
  Network n;
  n.spec = NetworkSpec::parse(j.at("spec").get<std::string>());
  n.params = j.at("params").get<std::vector<double>>();
  if (n.params.size() != param_count(n.spec)) {
    throw UsageError(std::string("checkpoint: ") + what + " " + n.spec.to_string() + " needs " +
                     std::to_string(param_count(n.spec)) + " parameters, file has " +
                     std::to_string(n.params.size()));
  }
  return n;
}

json optional_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

void save_checkpoint(const std::string& path, const RunConfig& config, const RunState& s) {
  json settings = json::object();
  for (const auto& [k, v] : to_settings(config)) settings[k] = v;
  json record = json::array();
  for (const auto& r : s.record) {
    record.push_back({r.iteration, r.wall_time_s, optional_number(r.loss), r.mu, r.errors.absolute,
                      r.errors.relative_objective, r.errors.constraint, r.errors.relative_fallback});
  }
  json j = {
      {"format", "varconstrain-checkpoint"},
      {"version", kCheckpointVersion},
      {"config", settings},
      {"solution", net_json(s.solution)},
      {"adam_solution", adam_json(s.adam_solution)},
      {"lambda", s.lambda},
      {"k", s.k},
      {"eta_steps", s.eta_steps},
      {"xi_steps", s.xi_steps},
      {"wall_time_s", s.wall_time_s},
      {"last_loss", optional_number(s.last_loss)},
      // Monte Carlo draws are a pure function of (mc_seed, eta_steps); nothing else is random.
      {"rng", {{"mc_seed", config.quad.mc_seed}, {"mc_resample", config.mc_resample}}},
      {"record", record},
  };
  if (config.method == Method::kALInfinite) {
    j["multiplier"] = net_json(s.multiplier);
    j["adam_multiplier"] = adam_json(s.adam_multiplier);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw UsageError("cannot write checkpoint " + tmp);
    out << j.dump() << '\n';
    if (!out) throw UsageError("failed writing checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read checkpoint " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("checkpoint " + path + " is not valid JSON: " + e.what());
  }
  try {
    if (j.value("format", "") != "varconstrain-checkpoint") {
      throw UsageError("checkpoint " + path + ": not a varconstrain checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw UsageError("checkpoint " + path + ": version " + std::to_string(version) +
                       ", this build reads version " + std::to_string(kCheckpointVersion));
    }
    Checkpoint c;
    Settings settings;
    for (const auto& [k, v] : j.at("config").items()) settings.emplace_back(k, v.get<std::string>());
    RunConfig cfg;
    apply_settings(cfg, settings);
    c.config = cfg;

    RunState& s = c.state;
    s.solution = net_from(j.at("solution"), "solution network");
    if (!(s.solution.spec == cfg.solution)) {
      throw UsageError("checkpoint: stored solution network " + s.solution.spec.to_string() +
                       " does not match its config " + cfg.solution.to_string());
    }
    s.adam_solution = adam_from(j.at("adam_solution"));
    if (s.adam_solution.m.size() != s.solution.params.size() ||
        s.adam_solution.v.size() != s.solution.params.size()) {
      throw UsageError("checkpoint: optimizer state size does not match the solution network");
    }
    s.lambda = j.at("lambda").get<std::vector<double>>();
    if (cfg.method == Method::kALInfinite) {
      s.multiplier = net_from(j.at("multiplier"), "multiplier network");
      if (!(s.multiplier.spec == cfg.multiplier)) {
        throw UsageError("checkpoint: stored multiplier network " + s.multiplier.spec.to_string() +
                         " does not match its config " + cfg.multiplier.to_string());
      }
      s.adam_multiplier = adam_from(j.at("adam_multiplier"));
      if (s.adam_multiplier.m.size() != s.multiplier.params.size()) {
        throw UsageError("checkpoint: optimizer state size does not match the multiplier network");
      }
    }
    s.k = j.at("k").get<std::int64_t>();
    s.eta_steps = j.at("eta_steps").get<std::int64_t>();
    s.xi_steps = j.at("xi_steps").get<std::int64_t>();
    s.wall_time_s = j.at("wall_time_s").get<double>();
    s.last_loss = number_or_nan(j.at("last_loss"));
    for (const auto& r : j.at("record")) {
      RunRow row;
      row.iteration = r.at(0).get<std::int64_t>();
      row.wall_time_s = r.at(1).get<double>();
      row.loss = number_or_nan(r.at(2));
      row.mu = r.at(3).get<double>();
      row.errors.absolute = r.at(4).get<double>();
      row.errors.relative_objective = r.at(5).get<double>();
      row.errors.constraint = r.at(6).get<double>();
      row.errors.relative_fallback = r.at(7).get<bool>();
      s.record.push_back(row);
    }
    const SolverConfig sc = solver_config(cfg);
    if (s.k < 0 || s.k > cfg.P || s.eta_steps != s.k * sc.QA() || s.xi_steps != s.k * sc.QB()) {
      throw UsageError("checkpoint: step counters are inconsistent with k = " + std::to_string(s.k));
    }
    return c;
  } catch (const json::exception& e) {
    throw UsageError("checkpoint " + path + " is malformed: " + e.what());
  }
}

void check_compatible(const Checkpoint& checkpoint, const RunConfig& config) {
  const RunConfig& have = checkpoint.config;
  auto refuse = [](const std::string& what, const std::string& a, const std::string& b) {
    throw UsageError("refusing to resume: " + what + " changed from " + a + " to " + b);
  };
  if (have.problem != config.problem) refuse("problem", have.problem, config.problem);
  if (have.method != config.method) {
    refuse("method", method_name(have.method), method_name(config.method));
  }
  if (!(have.solution == config.solution)) {
    refuse("solution network", have.solution.to_string(), config.solution.to_string());
  }
  if (config.method == Method::kALInfinite && !(have.multiplier == config.multiplier)) {
    refuse("multiplier network", have.multiplier.to_string(), config.multiplier.to_string());
  }
}

}  // namespace varconstrain
