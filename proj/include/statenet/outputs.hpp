#pragma once

#include <filesystem>
#include <string>

#include "statenet/flow.hpp"
#include "statenet/harness.hpp"

#include "json.hpp"

namespace statenet {

/// Full round-trip precision ("%.17g") so downstream recomputation is exact.
std::string format_double(double v);

/// Header "iter,x_0,...,x_{n-1}", one row per stored state.
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& traj);

/// Header "iter,V,drift,bound,ok", one row per executed iteration.
void write_lyapunov_csv(const std::filesystem::path& path, const DriftLedger& ledger);

/// Flow samples in the trajectory CSV layout (iter = sample index), plus a
/// companion network CSV carrying the lambda coordinates.
void write_flow_trajectory_csv(const std::filesystem::path& path, const FlowTrajectory& traj);
void write_flow_network_csv(const std::filesystem::path& path, const FlowTrajectory& traj);

struct RunArtifacts {
  std::string preset;
  std::string family;
  int n = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::MaxIters;
  int iterations = 0;
  double residual = 0.0;
  double final_lyapunov = 0.0;
  ClusterReport clusters;
  DriftLedger ledger;
};

nlohmann::json summary_json(const RunArtifacts& a);
void write_summary_json(const std::filesystem::path& path, const nlohmann::json& summary);

/// Structural validation against the shipped summary schema; returns the
/// list of violated fields (empty when valid).
std::vector<std::string> validate_summary(const nlohmann::json& summary);

// ---------------------------------------------------------------------------
// Plotting
// ---------------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<Vec> rows;
};

/// Strict reader for the CSVs this tool writes; malformed input throws
/// EvaluationError (the CLI maps it to exit code 4).
CsvTable read_csv(const std::filesystem::path& path);

/// Self-contained two-panel SVG: one polyline per agent (state vs iteration)
/// and the Lyapunov value vs iteration underneath. Byte-deterministic for a
/// given input; single-row trajectories degenerate to dots.
std::string render_svg(const CsvTable& trajectory, const CsvTable& lyapunov);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace statenet
