#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "statenet/config.hpp"
#include "statenet/outputs.hpp"
#include "statenet/runner.hpp"

using namespace statenet;
using nlohmann::json;

namespace {

json base_config() {
  return json{
      {"version", 1},
      {"preset", {{"name", "homogeneous_hk"}, {"epsilon", 10.0}}},
      {"n", 12},
      {"init", {{"kind", "uniform"}, {"lo", 0.0}, {"hi", 100.0}, {"seed", 42}}},
      {"dynamics", {{"max_iters", 30}}},
  };
}

std::filesystem::path temp_dir(const char* tag) {
  auto dir = std::filesystem::temp_directory_path() / (std::string("statenet_test_") + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("a valid config parses and materializes deterministically") {
  RunConfig cfg = parse_config(base_config());
  CHECK(cfg.n == 12);
  CHECK(cfg.preset_name == "homogeneous_hk");

  RunInstance a = materialize(cfg);
  RunInstance b = materialize(cfg);
  CHECK(a.x0 == b.x0);
  for (double v : a.x0) {
    CHECK(v >= 0.0);
    CHECK(v < 100.0);
  }

  RunInstance c = materialize(cfg, 43u);
  CHECK(a.x0 != c.x0);
}

TEST_CASE("unknown keys are rejected and named") {
  json doc = base_config();
  doc["preset"]["epsilonn"] = 3.0;  // typo must not pass silently
  try {
    parse_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool found = false;
    for (const auto& f : e.fields()) found |= f.find("epsilonn") != std::string::npos;
    CHECK(found);
  }

  json doc2 = base_config();
  doc2["extra_top_level"] = 1;
  CHECK_THROWS_AS(parse_config(doc2), ConfigError);
}

TEST_CASE("random init without a seed is a schema violation") {
  json doc = base_config();
  doc["init"].erase("seed");
  try {
    parse_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool found = false;
    for (const auto& f : e.fields()) found |= f.find("init.seed") != std::string::npos;
    CHECK(found);
  }
}

TEST_CASE("explicit init must match n") {
  json doc = base_config();
  doc["init"] = json{{"kind", "explicit"}, {"values", {1.0, 2.0}}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc["n"] = 2;
  RunConfig cfg = parse_config(doc);
  RunInstance inst = materialize(cfg);
  CHECK(inst.x0 == Vec{1.0, 2.0});
}

TEST_CASE("family and schedule overrides are validated") {
  json doc = base_config();
  doc["dynamics"]["family"] = "no_such_family";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc["dynamics"]["family"] = "quasi_newton";
  doc["dynamics"]["schedule"] = json{{"kind", "warp"}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc["dynamics"]["schedule"] = json{{"kind", "fixed"}, {"t", 0.5}};
  RunConfig cfg = parse_config(doc);
  RunInstance inst = materialize(cfg);
  CHECK(inst.dynamics.family == Family::QuasiNewton);
  CHECK(inst.dynamics.schedule.alpha(3, 1.0) == doctest::Approx(0.5));
  // Saddle-point families flip to the far rule.
  CHECK(inst.dynamics.effective_rule() == NeighborhoodRule::RepelWhenFar);
}

TEST_CASE("drawn preset vectors come from their own seed") {
  json doc = base_config();
  doc["preset"] = json{{"name", "heterogeneous_hk"},
                       {"epsilon_i", {{"lo", 0.0}, {"hi", 10.0}, {"seed", 7}}}};
  RunConfig cfg = parse_config(doc);
  RunInstance a = materialize(cfg);
  RunInstance b = materialize(cfg);
  CHECK(a.model.g->size() == 12);
  // determinism across materializations
  Vec xa = a.x0, xb = b.x0;
  CHECK(xa == xb);
  TrajectoryRecord ta = run(a.dynamics, a.x0, *a.model.g, a.model.f);
  TrajectoryRecord tb = run(b.dynamics, b.x0, *b.model.g, b.model.f);
  CHECK(ta.states.back() == tb.states.back());
}

TEST_CASE("execute_run writes byte-identical artifacts under a fixed seed") {
  RunConfig cfg = parse_config(base_config());
  auto dir1 = temp_dir("det1");
  auto dir2 = temp_dir("det2");
  RunOutcome o1 = execute_run(cfg, dir1);
  RunOutcome o2 = execute_run(cfg, dir2);

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  CHECK(slurp(o1.trajectory_csv) == slurp(o2.trajectory_csv));
  CHECK(slurp(o1.lyapunov_csv) == slurp(o2.lyapunov_csv));

  render_plot(o1.trajectory_csv, o1.lyapunov_csv, dir1 / "plot.svg");
  render_plot(o2.trajectory_csv, o2.lyapunov_csv, dir2 / "plot.svg");
  CHECK(slurp(dir1 / "plot.svg") == slurp(dir2 / "plot.svg"));

  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("trajectory CSV round-trips at full precision") {
  RunConfig cfg = parse_config(base_config());
  auto dir = temp_dir("csv");
  RunOutcome out = execute_run(cfg, dir);

  RunInstance inst = materialize(cfg);
  TrajectoryRecord traj = run(inst.dynamics, inst.x0, *inst.model.g, inst.model.f);
  CsvTable table = read_csv(out.trajectory_csv);
  REQUIRE(table.header.size() == 13);  // iter + 12 agents
  REQUIRE(table.rows.size() == traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    CHECK(table.rows[k][0] == doctest::Approx(static_cast<double>(k)));
    for (int i = 0; i < 12; ++i) CHECK(table.rows[k][i + 1] == traj.states[k][i]);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary validates against the shipped structural schema") {
  RunConfig cfg = parse_config(base_config());
  auto dir = temp_dir("summary");
  RunOutcome out = execute_run(cfg, dir);
  std::ifstream in(out.summary_path);
  json summary;
  in >> summary;
  CHECK(validate_summary(summary).empty());
  CHECK(summary["status"] == "converged");
  std::filesystem::remove_all(dir);
}

TEST_CASE("svg rendering: one polyline per agent, dots for single rows") {
  RunConfig cfg = parse_config(base_config());
  auto dir = temp_dir("svg");
  RunOutcome out = execute_run(cfg, dir);
  CsvTable traj = read_csv(out.trajectory_csv);
  CsvTable lyap = read_csv(out.lyapunov_csv);
  std::string svg = render_svg(traj, lyap);

  std::size_t count = 0;
  for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
       pos = svg.find("<polyline", pos + 1)) {
    ++count;
  }
  CHECK(count == 13);  // 12 agents + the Lyapunov panel

  // Single-row trajectory degenerates to circles, no segments.
  CsvTable single{traj.header, {traj.rows.front()}};
  std::string dots = render_svg(single, CsvTable{{"iter", "V"}, {}});
  CHECK(dots.find("<polyline") == std::string::npos);
  CHECK(dots.find("<circle") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed CSV input is reported") {
  auto dir = temp_dir("badcsv");
  auto path = dir / "broken.csv";
  std::ofstream(path) << "iter,x_0\n0,oops\n";
  CHECK_THROWS_AS(read_csv(path), EvaluationError);
  std::ofstream(path) << "iter,x_0\n0\n";
  CHECK_THROWS_AS(read_csv(path), EvaluationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("flow-mode config integrates and writes network samples") {
  json doc{
      {"version", 1},
      {"mode", "flow"},
      {"preset", {{"name", "homogeneous_hk"}, {"epsilon", 1.0}}},
      {"n", 2},
      {"init", {{"kind", "explicit"}, {"values", {0.0, 2.0}}}},
      {"flow", {{"dt", 0.1}, {"T", 0.1}, {"lambda0", 0.0}}},
  };
  RunConfig cfg = parse_config(doc);
  auto dir = temp_dir("flow");
  RunOutcome out = execute_run(cfg, dir);
  CsvTable net = read_csv(dir / "network.csv");
  REQUIRE(net.rows.size() == 2);
  CHECK(net.rows.back()[2] == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(net.rows.back()[3] == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(out.artifacts.iterations == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify passes on a well-declared model") {
  RunConfig cfg = parse_config(base_config());
  auto rows = verify_config(cfg);
  for (const auto& r : rows) {
    if (r.mandatory) CHECK(r.pass);
  }
}

TEST_CASE("verify fails the audit when m is understated") {
  json doc = base_config();
  doc["dynamics"]["family"] = "bcd_majorize";
  doc["dynamics"]["m"] = 0.25;  // true second partials reach 1
  RunConfig cfg = parse_config(doc);
  auto rows = verify_config(cfg);
  bool audit_failed = false;
  for (const auto& r : rows) {
    if (r.name == "smoothness_audit") audit_failed = !r.pass;
  }
  CHECK(audit_failed);
}
