#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "varconstrain/errors.hpp"
#include "varconstrain/runner.hpp"

using namespace varconstrain;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("varconstrain_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig tiny(const std::string& problem, Method method) {
  RunConfig c = preset_config(problem, method, "desk");
  c.E = 40;
  c.P = 2;
  c.log_every = 10;
  c.checkpoint_every = 1;
  c.solution = NetworkSpec::parse(problem == "geodesic" ? "FF(5,1,1,1)" : "FF(5,1,2,1)");
  c.multiplier = NetworkSpec::parse(problem == "minimal-surface" ? "FF(4,1,1,1)" : "FF(4,1,2,1)");
  c.quad.n1d = 8;
  c.quad.n2d = 4;
  c.quad.nface = 3;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// errors.csv without the wall-time column.
std::string without_wall(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, out;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    out += line.substr(0, a) + line.substr(b) + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("settings text") {
  const auto s = parse_settings("# comment\nE = 100  # steps\n\n P=10\narch.solution = FF(3,1,1,1)\n");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == std::pair<std::string, std::string>{"E", "100"});
  CHECK(s[2].second == "FF(3,1,1,1)");
  CHECK_THROWS_AS(parse_settings("E 100"), UsageError);
  RunConfig c;
  CHECK_THROWS_AS(apply_setting(c, "nope", "1"), UsageError);
  CHECK_THROWS_AS(apply_setting(c, "E", "1e3"), UsageError);
  CHECK_THROWS_AS(apply_setting(c, "lr.L0", "fast"), UsageError);
}

TEST_CASE("settings round trip") {
  RunConfig c = preset_config("grad-shafranov", Method::kALInfinite, "paper");
  c.seed = 99;
  c.quad.z_norm = 0.5;
  RunConfig back;
  apply_settings(back, to_settings(c));
  CHECK(to_settings(back) == to_settings(c));
  CHECK(back.L1.value() == 1e-6);
  CHECK(back.multiplier == NetworkSpec::parse("FF(50,3,2,1)"));
}

TEST_CASE("paper presets") {
  const auto geo = preset_config("geodesic", Method::kPenalty, "paper");
  CHECK(geo.E == 50000);
  CHECK(geo.P == 2500);
  CHECK(solver_config(geo).Q() == 20);
  CHECK(param_count(geo.solution) == 21051);
  const auto ms = solver_config(preset_config("minimal-surface", Method::kALInfinite, "paper"));
  CHECK(ms.QA() == 10);
  CHECK(ms.QB() == 10);
  CHECK(ms.lr.D0 == 0.2);
  CHECK(ms.lr.T == 194059);
  CHECK(solver_config(geo).lr.T == 15841);
  CHECK(param_count(preset_config("beltrami", Method::kALInfinite, "paper").multiplier) == 5453);
  CHECK_THROWS_AS(preset_config("geodesic", Method::kPenalty, "huge"), UsageError);
  for (const char* p : {"minimal-surface", "grad-shafranov", "beltrami"}) {
    CHECK_NOTHROW(validate(preset_config(p, Method::kALInfinite, "paper")));
    CHECK_NOTHROW(validate(preset_config(p, Method::kPenalty, "desk")));
  }
  CHECK_NOTHROW(validate(preset_config("geodesic", Method::kALFinite, "desk")));
}

TEST_CASE("config rejections") {
  RunConfig c = tiny("geodesic", Method::kPenalty);
  c.P = 3;
  CHECK_THROWS_AS(validate(c), UsageError);
  RunConfig d = tiny("grad-shafranov", Method::kALInfinite);
  d.E = 42;
  d.P = 2;  // Q = 21
  CHECK_THROWS_AS(validate(d), UsageError);
  RunConfig e = tiny("geodesic", Method::kPenalty);
  e.q = 7;
  CHECK_THROWS_AS(validate(e), UsageError);
  RunConfig f = tiny("geodesic", Method::kALInfinite);
  CHECK_THROWS_AS(validate(f), UsageError);
}

TEST_CASE("run artifacts and determinism") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  std::ostringstream log;
  const RunConfig c = tiny("minimal-surface", Method::kALInfinite);
  REQUIRE(run_experiment(c, a, log) == 0);
  REQUIRE(run_experiment(c, b, log) == 0);
  const auto rows = read_errors_csv(a / "errors.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].iteration == 10);
  CHECK(rows[3].iteration == 40);
  CHECK(slurp(a / "errors.csv").rfind(kErrorsHeader, 0) == 0);
  CHECK(without_wall(a / "errors.csv") == without_wall(b / "errors.csv"));
  CHECK(fs::exists(a / "summary.json"));
  CHECK(slurp(a / "summary.json").find("\"completed\"") != std::string::npos);

  const auto rep = scratch("report_one");
  CHECK(write_report({a}, rep).size() == 4);
  CHECK(fs::exists(rep / "constraint_error.dat"));
}

TEST_CASE("checkpoint round trip and resume") {
  const auto dir = scratch("resume");
  std::ostringstream log;
  const RunConfig c = tiny("grad-shafranov", Method::kALInfinite);
  auto problem = make_problem(c.problem, c.quad);
  const SolverConfig sc = solver_config(c);

  RunState full = initial_state(*problem, sc);
  solve(*problem, sc, full);

  RunState half = initial_state(*problem, sc);
  solve(*problem, sc, half, {}, 1);
  fs::create_directories(dir);
  save_checkpoint((dir / "checkpoint.json").string(), c, half);
  const Checkpoint loaded = load_checkpoint((dir / "checkpoint.json").string());
  CHECK(loaded.state.solution.params == half.solution.params);
  CHECK(loaded.state.multiplier.params == half.multiplier.params);
  CHECK(loaded.state.adam_solution.v == half.adam_solution.v);
  CHECK(loaded.state.k == 1);
  CHECK(to_settings(loaded.config) == to_settings(c));

  REQUIRE(resume_experiment(dir, log) == 0);
  const Checkpoint done = load_checkpoint((dir / "checkpoint.json").string());
  CHECK(done.state.k == 2);
  CHECK(done.state.solution.params == full.solution.params);
  CHECK(done.state.multiplier.params == full.multiplier.params);
  const auto rows = read_errors_csv(dir / "errors.csv");
  REQUIRE(rows.size() == full.record.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].loss == full.record[i].loss);
    CHECK(rows[i].absolute == full.record[i].errors.absolute);
  }

  RunConfig edited = c;
  edited.solution = NetworkSpec::parse("FF(6,1,2,1)");
  CHECK_THROWS_AS(resume_experiment(dir, log, &edited), UsageError);
}

TEST_CASE("checkpoint refuses edited files") {
  const auto dir = scratch("edited");
  fs::create_directories(dir);
  RunConfig c = tiny("minimal-surface", Method::kPenalty);
  c.solution = NetworkSpec::parse("FF(50,3,2,1)");
  auto problem = make_problem(c.problem, c.quad);
  const RunState s = initial_state(*problem, solver_config(c));
  const auto path = (dir / "checkpoint.json").string();
  save_checkpoint(path, c, s);
  CHECK(load_checkpoint(path).state.solution.params.size() == 5301);

  std::string text = slurp(path);
  const auto edit = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    t.replace(t.find(from), from.size(), to);
    std::ofstream(path) << t;
  };
  edit("FF(50,3,2,1)", "FF(40,3,2,1)");
  CHECK_THROWS_AS(load_checkpoint(path), UsageError);
  edit("\"version\":1", "\"version\":7");
  CHECK_THROWS_AS(load_checkpoint(path), UsageError);
  std::ofstream(path) << "{not json";
  CHECK_THROWS_AS(load_checkpoint(path), UsageError);
}

TEST_CASE("numeric failure keeps partial artifacts") {
  const auto dir = scratch("nan");
  std::ostringstream log;
  RunConfig c = tiny("geodesic", Method::kPenalty);
  c.L0 = 1e200;
  CHECK(run_experiment(c, dir, log) == 2);
  CHECK(fs::exists(dir / "errors.csv"));
  CHECK(fs::exists(dir / "checkpoint.json"));
  CHECK(slurp(dir / "summary.json").find("\"failed\"") != std::string::npos);
  CHECK(load_checkpoint((dir / "checkpoint.json").string()).state.k == 0);
}

TEST_CASE("two-run comparison") {
  const auto pen = scratch("cmp_pen");
  const auto al = scratch("cmp_al");
  std::ostringstream log;
  REQUIRE(run_experiment(tiny("grad-shafranov", Method::kPenalty), pen, log) == 0);
  REQUIRE(run_experiment(tiny("grad-shafranov", Method::kALInfinite), al, log) == 0);
  const auto out = scratch("cmp_out");
  const auto files = write_report({al, pen}, out);
  CHECK(files.size() == 9);
  const std::string cmp = slurp(out / "comparison.txt");
  CHECK(cmp.find("wall(penalty) / wall(al-inf)") != std::string::npos);
  CHECK_THROWS_AS(write_report({}, out), UsageError);
  CHECK_THROWS_AS(write_report({scratch("missing")}, out), UsageError);
}

TEST_CASE("antipodal preset") {
  const RunConfig c = preset_config("geodesic", Method::kPenalty, "antipodal");
  CHECK(c.quad.phi1 == doctest::Approx(std::numbers::pi));
  CHECK(c.E == 5000);
  CHECK_NOTHROW(validate(c));
  CHECK_NOTHROW(make_problem(c.problem, c.quad));
  CHECK_THROWS_AS(preset_config("beltrami", Method::kPenalty, "antipodal"), UsageError);
}
