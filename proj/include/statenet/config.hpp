#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "statenet/flow.hpp"
#include "statenet/models.hpp"

#include "json.hpp"

namespace statenet {

/// Parsed, schema-validated run configuration. Unknown keys anywhere in the
/// document are rejected (fail-closed) so parameter typos cannot silently
/// change a run.
struct RunConfig {
  int version = 1;
  enum class Mode { Discrete, Flow } mode = Mode::Discrete;

  std::string preset_name;
  PresetParams preset_params;
  int n = 0;

  struct Init {
    enum class Kind { Uniform, Explicit } kind = Kind::Uniform;
    double lo = 0.0, hi = 1.0;
    std::uint64_t seed = 0;  // mandatory for uniform init
    Vec values;
  } init;

  // Optional overrides of the preset-recommended dynamics.
  std::optional<std::string> family;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::optional<double> m;
  std::optional<bool> backtracking;
  std::optional<StepSchedule> schedule;
  struct TransferCfg {
    TransferFunctionSet::Kind kind = TransferFunctionSet::Kind::Exp;
    double param = 0.1;
    TransferForm form = TransferForm::ProofQ;
  };
  std::optional<TransferCfg> transfer;
  std::optional<MirrorMap> mirror;

  struct FlowCfg {
    double dt = 1e-3;
    double T = 50.0;
    int stride = 1;
    double lambda0 = 0.0;
    FlowMethod method = FlowMethod::ProjectedEuler;
  } flow;

  std::optional<std::string> output_dir;
};

/// Parses and validates a config document. Throws ConfigError listing the
/// offending fields.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads a config file; distinguishes unreadable files (ConfigError with
/// field "io") from schema violations.
RunConfig load_config_file(const std::filesystem::path& path);

/// Everything needed to execute a run.
struct RunInstance {
  ModelPreset model;
  DynamicsSpec dynamics;
  Vec x0;
  std::uint64_t seed = 0;
  RunConfig config;
  /// Preset parameters with drawn vectors resolved to concrete values.
  PresetParams resolved_params;
};

/// Builds the preset, applies overrides, and draws the initial state.
/// `seed_override` replaces every seed in the config when set.
RunInstance materialize(const RunConfig& config, std::optional<std::uint64_t> seed_override = {});

}  // namespace statenet
