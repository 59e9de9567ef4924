#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "varconstrain/errors.hpp"
#include "varconstrain/runner.hpp"

using namespace varconstrain;

namespace {

struct RunFlags {
  std::string problem;
  std::string method;
  std::string config_file;
  std::string out;
  std::string preset = "paper";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--problem", f.problem, "minimal-surface | geodesic | grad-shafranov | beltrami");
  cmd->add_option("--method", f.method, "penalty | al-f | al-inf");
  cmd->add_option("--config", f.config_file, "key = value file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "network initialization seed");
  cmd->add_option("--preset", f.preset, "paper (default) | desk | antipodal (geodesic, desk scale)")->check(CLI::IsMember({"paper", "desk", "antipodal"}));
  cmd->add_option("--set", f.overrides, "extra key=value setting (repeatable)");
}

RunConfig build_config(const RunFlags& f) {
  Settings file;
  if (!f.config_file.empty()) file = read_settings_file(f.config_file);
  for (const auto& o : f.overrides) {
    const auto extra = parse_settings(o);
    file.insert(file.end(), extra.begin(), extra.end());
  }
  std::string problem = f.problem;
  std::string method = f.method;
  for (const auto& [k, v] : file) {
    if (k == "problem" && f.problem.empty()) problem = v;
    if (k == "method" && f.method.empty()) method = v;
  }
  if (problem.empty()) throw UsageError("no problem given (use --problem or a 'problem' key)");
  if (method.empty()) method = "penalty";

  RunConfig c = preset_config(problem, parse_method(method), f.preset);
  apply_settings(c, file);
  c.problem = problem;
  c.method = parse_method(method);
  if (const char* env = std::getenv("VARCONSTRAIN_SEED"); env != nullptr && *env != '\0') {
    apply_setting(c, "seed", env);
  }
  if (f.seed) c.seed = *f.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained optimization over neural-network function spaces"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "train one problem with one method");
  add_run_flags(run, run_flags);

  auto* verify = app.add_subcommand("verify", "check the numerical invariants");

  std::vector<std::string> report_runs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "write plot data from one or two run directories");
  report->add_option("runs", report_runs, "run directories")->required()->expected(1, 2);
  report->add_option("--out", report_out, "output directory (default: <first run>/report)");

  std::string resume_dir;
  std::string resume_config;
  auto* resume = app.add_subcommand("resume", "continue a run from its checkpoint");
  resume->add_option("dir", resume_dir, "run directory");
  resume->add_option("--out", resume_dir, "run directory");
  resume->add_option("--config", resume_config, "must agree with the checkpointed config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const RunConfig c = build_config(run_flags);
      const std::string out =
          run_flags.out.empty() ? "runs/" + c.problem + "-" + method_name(c.method) : run_flags.out;
      return run_experiment(c, out, std::cout);
    }
    if (verify->parsed()) {
      int failed = 0;
      for (const auto& r : verify_invariants()) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
        failed += r.passed ? 0 : 1;
      }
      std::cout << (failed == 0 ? "all invariants hold\n" : std::to_string(failed) + " failed\n");
      return failed == 0 ? 0 : 1;
    }
    if (report->parsed()) {
      std::vector<std::filesystem::path> dirs(report_runs.begin(), report_runs.end());
      const std::filesystem::path out = report_out.empty() ? dirs[0] / "report" : std::filesystem::path(report_out);
      for (const auto& p : write_report(dirs, out)) std::cout << p.string() << '\n';
      return 0;
    }
    if (resume->parsed()) {
      if (resume_dir.empty()) throw UsageError("resume needs a run directory");
      if (!resume_config.empty()) {
        RunFlags f;
        f.config_file = resume_config;
        Settings s = read_settings_file(resume_config);
        for (const auto& [k, v] : s) {
          if (k == "problem") f.problem = v;
        }
        if (f.problem.empty()) {
          f.problem = load_checkpoint((std::filesystem::path(resume_dir) / "checkpoint.json").string())
                          .config.problem;
        }
        const RunConfig c = build_config(f);
        return resume_experiment(resume_dir, std::cout, &c);
      }
      return resume_experiment(resume_dir, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
