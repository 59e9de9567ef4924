#include "varconstrain/runner.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "varconstrain/errors.hpp"
#include "varconstrain/metrics.hpp"

namespace varconstrain {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_line(const RunRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%lld,%.6f,%.17g,%.17g,%.17g,%.17g,%.17g",
                static_cast<long long>(r.iteration), r.wall_time_s, r.loss, r.mu, r.errors.absolute,
                r.errors.relative_objective, r.errors.constraint);
  return buf;
}

json errors_json(const ErrorTriple& e) {
  return {{"absolute_error", e.absolute},
          {"relative_objective_error", e.relative_objective},
          {"relative_objective_fallback", e.relative_fallback},
          {"constraint_error", e.constraint}};
}

void write_summary(const fs::path& out, const RunConfig& config, const RunState& state,
                   const std::string& status, const std::string& message,
                   const ErrorTriple* final_errors) {
  json j = {{"status", status},
            {"problem", config.problem},
            {"method", method_name(config.method)},
            {"subproblems_completed", state.k},
            {"iterations", state.iteration()},
            {"solution_steps", state.eta_steps},
            {"multiplier_steps", state.xi_steps},
            {"wall_time_s", state.wall_time_s}};
  if (final_errors != nullptr) j["final_errors"] = errors_json(*final_errors);
  if (!message.empty()) j["message"] = message;
  std::ofstream f(out / "summary.json");
  f << j.dump(2) << '\n';
}

int drive(const RunConfig& config, RunState& state, const fs::path& out, std::ostream& log) {
  auto problem = make_problem(config.problem, config.quad);
  const SolverConfig sc = solver_config(config);
  sc.validate(*problem);

  std::ofstream csv(out / "errors.csv", std::ios::trunc);
  if (!csv) throw UsageError("cannot write " + (out / "errors.csv").string());
  csv << kErrorsHeader << '\n';
  for (const auto& r : state.record) csv << csv_line(r) << '\n';
  csv.flush();

  const std::string ckpt = (out / "checkpoint.json").string();
  RunState last_good = state;
  SolverHooks hooks;
  hooks.row = [&](const RunRow& r) {
    csv << csv_line(r) << '\n';
    csv.flush();
    log << "iter " << r.iteration << "  loss " << r.loss << "  abs " << r.errors.absolute
        << "  rel " << r.errors.relative_objective << "  con " << r.errors.constraint << "  ("
        << r.wall_time_s << " s)\n";
  };
  hooks.subproblem_done = [&](const RunState& s) {
    last_good = s;
    if (s.k % config.checkpoint_every == 0 || s.k == config.P) save_checkpoint(ckpt, config, s);
  };

  try {
    solve(*problem, sc, state, hooks);
  } catch (const NumericError& e) {
    save_checkpoint(ckpt, config, last_good);
    const std::string msg = std::string("numeric failure at iteration ") +
                            std::to_string(state.iteration() + 1) + ": " + e.what() +
                            "; checkpoint holds subproblem " + std::to_string(last_good.k);
    write_summary(out, config, state, "failed", msg, nullptr);
    log << "error: " << msg << '\n';
    return 2;
  }
  save_checkpoint(ckpt, config, state);
  const ErrorTriple final_errors = evaluate_errors(*problem, net_eval(state.solution));
  write_summary(out, config, state, "completed", "", &final_errors);
  log << "done: " << state.iteration() << " iterations, " << state.wall_time_s
      << " s; absolute " << final_errors.absolute << ", relative objective "
      << final_errors.relative_objective << (final_errors.relative_fallback ? " (|f|)" : "")
      << ", constraint " << final_errors.constraint << '\n';
  return 0;
}

}  // namespace

int run_experiment(const RunConfig& config, const fs::path& out, std::ostream& log) {
  validate(config);
  fs::create_directories(out);
  {
    std::ofstream f(out / "config.txt");
    f << format_settings(to_settings(config));
  }
  auto problem = make_problem(config.problem, config.quad);
  RunState state = initial_state(*problem, solver_config(config));
  log << config.problem << " / " << method_name(config.method) << ": E=" << config.E
      << " P=" << config.P << " Q=" << config.Q() << " net " << config.solution.to_string() << '\n';
  return drive(config, state, out, log);
}

int resume_experiment(const fs::path& out, std::ostream& log, const RunConfig* config) {
  Checkpoint c = load_checkpoint((out / "checkpoint.json").string());
  if (config != nullptr) check_compatible(c, *config);
  log << "resuming " << c.config.problem << " / " << method_name(c.config.method)
      << " after subproblem " << c.state.k << " of " << c.config.P << '\n';
  return drive(c.config, c.state, out, log);
}

std::vector<CsvRow> read_errors_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kErrorsHeader) {
    throw UsageError(path.string() + ": unexpected header (expected " + kErrorsHeader + ")");
  }
  std::vector<CsvRow> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    CsvRow r;
    long long it = 0;
    if (std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%lf,%lf,%lf", &it, &r.wall_time_s, &r.loss,
                    &r.mu, &r.absolute, &r.relative_objective, &r.constraint) != 7) {
      throw UsageError(path.string() + " line " + std::to_string(n) + ": malformed row");
    }
    r.iteration = it;
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::vector<fs::path> write_series(const std::vector<CsvRow>& rows, const fs::path& dir) {
  fs::create_directories(dir);
  const std::pair<const char*, double CsvRow::*> series[] = {
      {"absolute_error", &CsvRow::absolute},
      {"relative_objective_error", &CsvRow::relative_objective},
      {"constraint_error", &CsvRow::constraint},
      {"wall_time_s", &CsvRow::wall_time_s},
  };
  std::vector<fs::path> written;
  for (const auto& [name, field] : series) {
    const fs::path p = dir / (std::string(name) + ".dat");
    std::ofstream f(p);
    f << "# iteration " << name << '\n';
    char buf[64];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%lld %.10g\n", static_cast<long long>(r.iteration), r.*field);
      f << buf;
    }
    written.push_back(p);
  }
  return written;
}

struct RunInfo {
  std::string method = "unknown";
  double wall = 0.0;
  std::vector<CsvRow> rows;
};

RunInfo read_run(const fs::path& dir) {
  RunInfo info;
  info.rows = read_errors_csv(dir / "errors.csv");
  if (!info.rows.empty()) info.wall = info.rows.back().wall_time_s;
  std::ifstream s(dir / "summary.json");
  if (s) {
    const json j = json::parse(s, nullptr, false);
    if (!j.is_discarded()) {
      info.method = j.value("method", info.method);
      info.wall = j.value("wall_time_s", info.wall);
    }
  }
  return info;
}

}  // namespace

std::vector<fs::path> write_report(const std::vector<fs::path>& runs, const fs::path& out) {
  if (runs.empty() || runs.size() > 2) throw UsageError("report: give one or two run directories");
  if (runs.size() == 1) return write_series(read_run(runs[0]).rows, out);

  const RunInfo a = read_run(runs[0]);
  const RunInfo b = read_run(runs[1]);
  std::vector<fs::path> written;
  for (int i = 0; i < 2; ++i) {
    const auto part = write_series(i == 0 ? a.rows : b.rows, out / (i == 0 ? "run_a" : "run_b"));
    written.insert(written.end(), part.begin(), part.end());
  }
  // Ratio orientation: penalty time over augmented Lagrangian time when the pair allows it.
  const bool swap = a.method != "penalty" && b.method == "penalty";
  const RunInfo& num = swap ? b : a;
  const RunInfo& den = swap ? a : b;
  const fs::path cmp = out / "comparison.txt";
  std::ofstream f(cmp);
  char buf[256];
  f << "run_a = " << runs[0].string() << " (" << a.method << ")\n";
  f << "run_b = " << runs[1].string() << " (" << b.method << ")\n";
  std::snprintf(buf, sizeof buf, "wall_time_s_a = %.6f\nwall_time_s_b = %.6f\n", a.wall, b.wall);
  f << buf;
  std::snprintf(buf, sizeof buf, "speedup = %.6f  # wall(%s) / wall(%s)\n",
                den.wall > 0 ? num.wall / den.wall : 0.0, num.method.c_str(), den.method.c_str());
  f << buf;
  if (!a.rows.empty() && !b.rows.empty()) {
    std::snprintf(buf, sizeof buf,
                  "final_absolute_error_a = %.10g\nfinal_absolute_error_b = %.10g\n"
                  "final_constraint_error_a = %.10g\nfinal_constraint_error_b = %.10g\n",
                  a.rows.back().absolute, b.rows.back().absolute, a.rows.back().constraint,
                  b.rows.back().constraint);
    f << buf;
  }
  written.push_back(cmp);
  return written;
}

}  // namespace varconstrain
