#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "statenet/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUnreadable = 2;
constexpr int kExitSchema = 3;
constexpr int kExitBadCsv = 4;

int classify_config_error(const statenet::ConfigError& e) {
  for (const auto& f : e.fields()) {
    if (f == "io") return kExitUnreadable;
  }
  return kExitSchema;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statenet: state-dependent network dynamics runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd, bool need_config = true) {
    auto* opt = cmd->add_option("--config", config_path, "run configuration JSON");
    if (need_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override every seed in the config")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* cmd_run = app.add_subcommand("run", "execute a configured run and write artifacts");
  add_common(cmd_run);

  CLI::App* cmd_verify = app.add_subcommand("verify", "model self-checks for a config");
  add_common(cmd_verify);

  CLI::App* cmd_plot = app.add_subcommand("plot", "render the SVG for a finished run");
  add_common(cmd_plot, false);
  std::string traj_path, lyap_path, svg_path;
  cmd_plot->add_option("--trajectory", traj_path, "trajectory CSV (instead of --config)");
  cmd_plot->add_option("--lyapunov", lyap_path, "lyapunov CSV");
  cmd_plot->add_option("--svg", svg_path, "output SVG path");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run every config in a sweep file");
  add_common(cmd_sweep);

  CLI11_PARSE(app, argc, argv);

  auto seed_override = [&]() -> std::optional<std::uint64_t> {
    if (seed_set) return seed;
    return std::nullopt;
  };

  try {
    if (cmd_run->parsed()) {
      statenet::RunConfig cfg = statenet::load_config_file(config_path);
      std::filesystem::path dir = cfg.output_dir && out_dir == "out" ? *cfg.output_dir : out_dir;
      statenet::RunOutcome out = statenet::execute_run(cfg, dir, seed_override());
      std::cout << "status: " << statenet::status_name(out.artifacts.status) << "\n"
                << "iterations: " << out.artifacts.iterations << "\n"
                << "clusters: " << out.artifacts.clusters.clusters.size() << "\n"
                << "wrote: " << out.trajectory_csv.string() << ", "
                << (out.lyapunov_csv.empty() ? std::string("-") : out.lyapunov_csv.string())
                << ", " << out.summary_path.string() << "\n";
      return kExitOk;
    }

    if (cmd_verify->parsed()) {
      statenet::RunConfig cfg = statenet::load_config_file(config_path);
      auto rows = statenet::verify_config(cfg, seed_override());
      bool ok = true;
      std::printf("%-22s %-6s %s\n", "check", "result", "detail");
      for (const auto& r : rows) {
        std::printf("%-22s %-6s %s%s\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                    r.detail.c_str(), r.mandatory ? "" : " (observational)");
        if (r.mandatory && !r.pass) ok = false;
      }
      return ok ? kExitOk : kExitFailure;
    }

    if (cmd_plot->parsed()) {
      std::filesystem::path traj, lyap, svg;
      if (!traj_path.empty()) {
        traj = traj_path;
        lyap = lyap_path;
        svg = svg_path.empty() ? traj.parent_path() / "plot.svg" : std::filesystem::path(svg_path);
      } else if (!config_path.empty()) {
        statenet::RunConfig cfg = statenet::load_config_file(config_path);
        std::filesystem::path dir = cfg.output_dir && out_dir == "out" ? *cfg.output_dir : out_dir;
        traj = dir / "trajectory.csv";
        lyap = dir / "lyapunov.csv";
        svg = svg_path.empty() ? dir / "plot.svg" : std::filesystem::path(svg_path);
      } else {
        std::cerr << "plot needs --config or --trajectory\n";
        return kExitSchema;
      }
      try {
        statenet::render_plot(traj, lyap, svg);
      } catch (const statenet::EvaluationError& e) {
        std::cerr << e.what() << "\n";
        return kExitBadCsv;
      }
      std::cout << "wrote: " << svg.string() << "\n";
      return kExitOk;
    }

    if (cmd_sweep->parsed()) {
      auto lines = statenet::run_sweep(config_path, out_dir, seed_override());
      bool ok = true;
      for (const auto& line : lines) {
        std::cout << line << "\n";
        if (line.find(": error:") != std::string::npos) ok = false;
      }
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const statenet::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return classify_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
