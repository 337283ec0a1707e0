// End-to-end checks against the installed binary: exit codes, artifact
// layout, and rerun determinism. Invoked as: cli_tests <statenet> <configs>.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_configs;
int g_failures = 0;

int run_cli(const std::string& args) {
  std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::cout << "  ok: " << what << "\n";
  } else {
    std::cout << "  FAIL: " << what << "\n";
    ++g_failures;
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("statenet_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: cli_tests <statenet-binary> <configs-dir>\n";
    return 2;
  }
  g_binary = argv[1];
  g_configs = argv[2];

  {
    std::cout << "run writes artifacts and exits 0\n";
    fs::path out = fresh_dir("run");
    int rc = run_cli("run --config " + (g_configs / "homogeneous_hk_small.json").string() +
                     " --out " + out.string());
    expect(rc == 0, "exit code 0");
    expect(fs::exists(out / "trajectory.csv"), "trajectory.csv exists");
    expect(fs::exists(out / "lyapunov.csv"), "lyapunov.csv exists");
    expect(fs::exists(out / "summary.json"), "summary.json exists");

    int prc = run_cli("plot --config " + (g_configs / "homogeneous_hk_small.json").string() +
                      " --out " + out.string());
    expect(prc == 0, "plot exit code 0");
    expect(fs::exists(out / "plot.svg"), "plot.svg exists");
    fs::remove_all(out);
  }

  {
    std::cout << "rerun with the same seed is byte-identical\n";
    fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    std::string cfg = (g_configs / "lazy_hk.json").string();
    run_cli("run --config " + cfg + " --out " + a.string());
    run_cli("run --config " + cfg + " --out " + b.string());
    run_cli("plot --config " + cfg + " --out " + a.string());
    run_cli("plot --config " + cfg + " --out " + b.string());
    expect(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"), "trajectory bytes equal");
    expect(slurp(a / "plot.svg") == slurp(b / "plot.svg"), "svg bytes equal");

    fs::path c = fresh_dir("det_c");
    run_cli("run --config " + cfg + " --out " + c.string() + " --seed 999");
    expect(slurp(a / "trajectory.csv") != slurp(c / "trajectory.csv"),
           "different seed changes the trajectory");
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
  }

  {
    std::cout << "config error handling\n";
    expect(run_cli("run --config /nonexistent/statenet.json") == 2, "unreadable config exits 2");

    fs::path dir = fresh_dir("bad");
    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"version":1,"preset":{"name":"homogeneous_hk","epsilon":1.0,)"
                       << R"("epsilonn":2.0},"n":4,)"
                       << R"("init":{"kind":"uniform","lo":0,"hi":1,"seed":1}})";
    expect(run_cli("run --config " + bad.string()) == 3, "schema violation exits 3");

    fs::path noseed = dir / "noseed.json";
    std::ofstream(noseed) << R"({"version":1,"preset":{"name":"homogeneous_hk","epsilon":1.0},)"
                          << R"("n":4,"init":{"kind":"uniform","lo":0,"hi":1}})";
    expect(run_cli("run --config " + noseed.string()) == 3, "missing seed exits 3");

    fs::path broken = dir / "broken.csv";
    std::ofstream(broken) << "iter,x_0\n0,not_a_number\n";
    expect(run_cli("plot --trajectory " + broken.string() + " --svg " +
                   (dir / "x.svg").string()) == 4,
           "malformed CSV exits 4");

    // K = 0: a single-row trajectory is still a completed run.
    fs::path k0 = dir / "k0.json";
    std::ofstream(k0) << R"({"version":1,"preset":{"name":"homogeneous_hk","epsilon":1.0},)"
                      << R"("n":3,"init":{"kind":"explicit","values":[0.0,0.5,2.0]},)"
                      << R"("dynamics":{"max_iters":0}})";
    fs::path outk0 = dir / "outk0";
    expect(run_cli("run --config " + k0.string() + " --out " + outk0.string()) == 0,
           "zero-iteration run exits 0");
    std::string csv = slurp(outk0 / "trajectory.csv");
    expect(std::count(csv.begin(), csv.end(), '\n') == 2, "trajectory has header plus one row");
    fs::remove_all(dir);
  }

  {
    std::cout << "verify\n";
    expect(run_cli("verify --config " + (g_configs / "lazy_hk.json").string()) == 0,
           "well-declared model passes");
    expect(run_cli("verify --config " + (g_configs / "heterogeneous_hk_10.json").string()) == 0,
           "observational drift does not fail the command");

    fs::path dir = fresh_dir("verify");
    fs::path wrongm = dir / "wrong_m.json";
    std::ofstream(wrongm) << R"({"version":1,"preset":{"name":"lazy_hk","epsilon":10.0},)"
                          << R"("n":10,"init":{"kind":"uniform","lo":0,"hi":50,"seed":4},)"
                          << R"("dynamics":{"m":0.2,"max_iters":20}})";
    expect(run_cli("verify --config " + wrongm.string()) != 0,
           "understated m fails the dominance audit");
    fs::remove_all(dir);
  }

  {
    std::cout << "sweep\n";
    fs::path out = fresh_dir("sweep");
    int rc = run_cli("sweep --config " + (g_configs / "sweep_demo.json").string() + " --out " +
                     out.string());
    expect(rc == 0, "sweep exits 0");
    expect(fs::exists(out / "lazy_hk" / "summary.json"), "per-run output directories");
    expect(fs::exists(out / "homogeneous_hk_small" / "trajectory.csv"), "second run present");
    fs::remove_all(out);
  }

  if (g_failures) {
    std::cout << g_failures << " CLI check(s) failed\n";
    return 1;
  }
  std::cout << "all CLI checks passed\n";
  return 0;
}
