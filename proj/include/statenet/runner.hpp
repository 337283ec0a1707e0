#pragma once

#include "statenet/config.hpp"
#include "statenet/outputs.hpp"

namespace statenet {

struct RunOutcome {
  RunArtifacts artifacts;
  std::filesystem::path trajectory_csv;
  std::filesystem::path lyapunov_csv;
  std::filesystem::path summary_path;
};

/// Executes a materialized run and writes trajectory.csv, lyapunov.csv and
/// summary.json into out_dir. Completion always succeeds regardless of the
/// convergence status (the status is data); only I/O or config problems
/// throw.
RunOutcome execute_run(const RunConfig& config, const std::filesystem::path& out_dir,
                       std::optional<std::uint64_t> seed_override = {});

/// Renders <out_dir>/plot.svg from the two CSVs execute_run wrote.
void render_plot(const std::filesystem::path& trajectory_csv,
                 const std::filesystem::path& lyapunov_csv, const std::filesystem::path& svg_path);

struct VerifyRow {
  std::string name;
  bool pass = false;
  bool mandatory = true;
  std::string detail;
};

/// Model self-checks: gradient fidelity, dual-oracle agreement at small n,
/// the declared-m audit, and a short drift-monitored run. Observational
/// families report drift without failing the command.
std::vector<VerifyRow> verify_config(const RunConfig& config,
                                     std::optional<std::uint64_t> seed_override = {});

/// Runs every config listed in a sweep file across worker threads
/// (STATENET_THREADS caps the fan-out). Returns one status line per run.
std::vector<std::string> run_sweep(const std::filesystem::path& sweep_path,
                                   const std::filesystem::path& out_root,
                                   std::optional<std::uint64_t> seed_override = {});

}  // namespace statenet
