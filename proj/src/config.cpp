#include "statenet/config.hpp"

#include <fstream>
#include <set>

#include "statenet/rng.hpp"

namespace statenet {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where, std::vector<std::string>& errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) errors.push_back(where + "." + it.key() + " (unknown key)");
  }
}

double need_number(const json& obj, const std::string& key, const std::string& where,
                   std::vector<std::string>& errors) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    errors.push_back(where + "." + key + " (number required)");
    return 0.0;
  }
  return obj[key].get<double>();
}

StepSchedule parse_schedule(const json& s, std::vector<std::string>& errors) {
  StepSchedule out;
  if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) {
    errors.push_back("dynamics.schedule.kind (string required)");
    return out;
  }
  std::string kind = s["kind"].get<std::string>();
  if (kind == "unit") {
    reject_unknown_keys(s, {"kind"}, "dynamics.schedule", errors);
    out = StepSchedule::unit();
  } else if (kind == "fixed") {
    reject_unknown_keys(s, {"kind", "t"}, "dynamics.schedule", errors);
    out = StepSchedule::fixed(need_number(s, "t", "dynamics.schedule", errors));
  } else if (kind == "diminishing") {
    reject_unknown_keys(s, {"kind", "c"}, "dynamics.schedule", errors);
    out = StepSchedule::diminishing(need_number(s, "c", "dynamics.schedule", errors));
  } else if (kind == "constant_eps") {
    reject_unknown_keys(s, {"kind", "eps", "G"}, "dynamics.schedule", errors);
    double eps = need_number(s, "eps", "dynamics.schedule", errors);
    double G = need_number(s, "G", "dynamics.schedule", errors);
    out = StepSchedule::constant_eps(eps, 1, G);  // n patched in materialize
  } else {
    errors.push_back("dynamics.schedule.kind (unknown schedule '" + kind + "')");
  }
  return out;
}

Vec parse_vector(const json& arr) {
  Vec v;
  v.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number()) throw ConfigError("non-numeric array entry");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  std::vector<std::string> errors;
  RunConfig cfg;

  if (!doc.is_object()) throw ConfigError("config root must be an object", {"(root)"});
  reject_unknown_keys(doc,
                      {"version", "mode", "preset", "n", "init", "dynamics", "flow", "output"},
                      "(root)", errors);

  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1) {
    errors.push_back("version (must be the integer 1)");
  }

  if (doc.contains("mode")) {
    std::string m = doc["mode"].is_string() ? doc["mode"].get<std::string>() : "";
    if (m == "discrete") cfg.mode = RunConfig::Mode::Discrete;
    else if (m == "flow") cfg.mode = RunConfig::Mode::Flow;
    else errors.push_back("mode (must be 'discrete' or 'flow')");
  }

  // --- preset ---------------------------------------------------------
  if (!doc.contains("preset") || !doc["preset"].is_object() || !doc["preset"].contains("name") ||
      !doc["preset"]["name"].is_string()) {
    errors.push_back("preset.name (string required)");
  } else {
    const json& p = doc["preset"];
    cfg.preset_name = p["name"].get<std::string>();
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"homogeneous_hk", {"name", "epsilon"}},
        {"lazy_hk", {"name", "epsilon"}},
        {"complement_hk", {"name", "epsilon"}},
        {"geometric_averaging", {"name", "epsilon"}},
        {"entropy_multiplicative", {"name", "epsilon"}},
        {"heterogeneous_hk", {"name", "epsilon_i"}},
        {"polarization", {"name", "threshold"}},
        {"weighted_consensus", {"name", "weights", "gap_constant"}},
    };
    auto it = allowed.find(cfg.preset_name);
    if (it == allowed.end()) {
      errors.push_back("preset.name (unknown preset '" + cfg.preset_name + "')");
    } else {
      reject_unknown_keys(p, it->second, "preset", errors);
      for (auto kv = p.begin(); kv != p.end(); ++kv) {
        const std::string& key = kv.key();
        if (key == "name") continue;
        const json& v = kv.value();
        if (key == "weights") {
          if (!v.is_array()) {
            errors.push_back("preset.weights (array of rows required)");
          } else {
            for (const auto& row : v) {
              Vec r = parse_vector(row);
              cfg.preset_params.matrix.insert(cfg.preset_params.matrix.end(), r.begin(), r.end());
            }
          }
        } else if (v.is_number()) {
          cfg.preset_params.scalars[key] = v.get<double>();
        } else if (v.is_array()) {
          cfg.preset_params.vectors[key] = parse_vector(v);
        } else if (v.is_object()) {
          // Drawn vector parameter: {"lo":..,"hi":..,"seed":..}.
          std::vector<std::string> sub;
          reject_unknown_keys(v, {"lo", "hi", "seed"}, "preset." + key, sub);
          double lo = need_number(v, "lo", "preset." + key, sub);
          double hi = need_number(v, "hi", "preset." + key, sub);
          if (!v.contains("seed") || !v["seed"].is_number_integer() ||
              v["seed"].get<std::int64_t>() < 0)
            sub.push_back("preset." + key + ".seed (nonnegative integer required)");
          if (sub.empty()) {
            cfg.preset_params.scalars["__draw_lo_" + key] = lo;
            cfg.preset_params.scalars["__draw_hi_" + key] = hi;
            cfg.preset_params.scalars["__draw_seed_" + key] =
                static_cast<double>(v["seed"].get<std::uint64_t>());
          }
          errors.insert(errors.end(), sub.begin(), sub.end());
        } else {
          errors.push_back("preset." + key + " (number, array, or draw object required)");
        }
      }
    }
  }

  // --- n and init ------------------------------------------------------
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<int>() < 1) {
    errors.push_back("n (positive integer required)");
  } else {
    cfg.n = doc["n"].get<int>();
  }

  if (!doc.contains("init") || !doc["init"].is_object()) {
    errors.push_back("init (object required)");
  } else {
    const json& init = doc["init"];
    std::string kind =
        init.contains("kind") && init["kind"].is_string() ? init["kind"].get<std::string>() : "";
    if (kind == "uniform") {
      reject_unknown_keys(init, {"kind", "lo", "hi", "seed"}, "init", errors);
      cfg.init.kind = RunConfig::Init::Kind::Uniform;
      cfg.init.lo = need_number(init, "lo", "init", errors);
      cfg.init.hi = need_number(init, "hi", "init", errors);
      if (!init.contains("seed") || !init["seed"].is_number_integer() ||
          init["seed"].get<std::int64_t>() < 0) {
        errors.push_back("init.seed (mandatory for random init; nonnegative integer)");
      } else {
        cfg.init.seed = init["seed"].get<std::uint64_t>();
      }
      if (cfg.init.lo >= cfg.init.hi) errors.push_back("init.lo (must be < init.hi)");
    } else if (kind == "explicit") {
      reject_unknown_keys(init, {"kind", "values"}, "init", errors);
      cfg.init.kind = RunConfig::Init::Kind::Explicit;
      if (!init.contains("values") || !init["values"].is_array()) {
        errors.push_back("init.values (array required)");
      } else {
        cfg.init.values = parse_vector(init["values"]);
        if (cfg.n > 0 && static_cast<int>(cfg.init.values.size()) != cfg.n)
          errors.push_back("init.values (length must equal n)");
      }
    } else {
      errors.push_back("init.kind (must be 'uniform' or 'explicit')");
    }
  }

  // --- dynamics overrides ----------------------------------------------
  if (doc.contains("dynamics")) {
    const json& dyn = doc["dynamics"];
    if (!dyn.is_object()) {
      errors.push_back("dynamics (object required)");
    } else {
      reject_unknown_keys(dyn,
                          {"family", "max_iters", "tol", "m", "backtracking", "schedule",
                           "transfer", "mirror"},
                          "dynamics", errors);
      if (dyn.contains("family")) {
        if (!dyn["family"].is_string()) {
          errors.push_back("dynamics.family (string required)");
        } else {
          cfg.family = dyn["family"].get<std::string>();
          try {
            family_from_name(*cfg.family);
          } catch (const ConfigError&) {
            errors.push_back("dynamics.family (unknown family '" + *cfg.family + "')");
          }
        }
      }
      if (dyn.contains("max_iters")) {
        if (!dyn["max_iters"].is_number_integer() || dyn["max_iters"].get<int>() < 0)
          errors.push_back("dynamics.max_iters (nonnegative integer required)");
        else
          cfg.max_iters = dyn["max_iters"].get<int>();
      }
      if (dyn.contains("tol")) {
        if (!dyn["tol"].is_number() || dyn["tol"].get<double>() < 0)
          errors.push_back("dynamics.tol (nonnegative number required; 0 disables the stop)");
        else
          cfg.tol = dyn["tol"].get<double>();
      }
      if (dyn.contains("m")) {
        if (!dyn["m"].is_number() || !(dyn["m"].get<double>() > 0))
          errors.push_back("dynamics.m (positive number required)");
        else
          cfg.m = dyn["m"].get<double>();
      }
      if (dyn.contains("backtracking")) {
        if (!dyn["backtracking"].is_boolean())
          errors.push_back("dynamics.backtracking (boolean required)");
        else
          cfg.backtracking = dyn["backtracking"].get<bool>();
      }
      if (dyn.contains("schedule")) cfg.schedule = parse_schedule(dyn["schedule"], errors);
      if (dyn.contains("transfer")) {
        const json& t = dyn["transfer"];
        std::vector<std::string> sub;
        reject_unknown_keys(t, {"kind", "param", "form"}, "dynamics.transfer", sub);
        RunConfig::TransferCfg tc;
        std::string kind =
            t.contains("kind") && t["kind"].is_string() ? t["kind"].get<std::string>() : "";
        if (kind == "exp") tc.kind = TransferFunctionSet::Kind::Exp;
        else if (kind == "smoothed_hinge") tc.kind = TransferFunctionSet::Kind::SmoothedHinge;
        else if (kind == "reciprocal") tc.kind = TransferFunctionSet::Kind::Reciprocal;
        else sub.push_back("dynamics.transfer.kind (exp | smoothed_hinge | reciprocal)");
        if (t.contains("param")) tc.param = need_number(t, "param", "dynamics.transfer", sub);
        if (t.contains("form")) {
          std::string form = t["form"].is_string() ? t["form"].get<std::string>() : "";
          if (form == "proof_q") tc.form = TransferForm::ProofQ;
          else if (form == "eq5") tc.form = TransferForm::Eq5;
          else sub.push_back("dynamics.transfer.form (proof_q | eq5)");
        }
        if (sub.empty()) cfg.transfer = tc;
        errors.insert(errors.end(), sub.begin(), sub.end());
      }
      if (dyn.contains("mirror")) {
        const json& mj = dyn["mirror"];
        std::vector<std::string> sub;
        reject_unknown_keys(mj, {"kind", "scale"}, "dynamics.mirror", sub);
        std::string kind =
            mj.contains("kind") && mj["kind"].is_string() ? mj["kind"].get<std::string>() : "";
        if (kind == "negative_entropy") cfg.mirror = MirrorMap::negative_entropy();
        else if (kind == "quadratic")
          cfg.mirror = MirrorMap::quadratic(mj.contains("scale") ? need_number(mj, "scale", "dynamics.mirror", sub) : 1.0);
        else sub.push_back("dynamics.mirror.kind (negative_entropy | quadratic)");
        errors.insert(errors.end(), sub.begin(), sub.end());
      }
    }
  }

  // --- flow -------------------------------------------------------------
  if (doc.contains("flow")) {
    const json& fl = doc["flow"];
    if (!fl.is_object()) {
      errors.push_back("flow (object required)");
    } else {
      reject_unknown_keys(fl, {"dt", "T", "stride", "lambda0", "method"}, "flow", errors);
      if (fl.contains("dt")) cfg.flow.dt = need_number(fl, "dt", "flow", errors);
      if (fl.contains("T")) cfg.flow.T = need_number(fl, "T", "flow", errors);
      if (fl.contains("stride")) {
        if (!fl["stride"].is_number_integer() || fl["stride"].get<int>() < 1)
          errors.push_back("flow.stride (positive integer required)");
        else
          cfg.flow.stride = fl["stride"].get<int>();
      }
      if (fl.contains("lambda0")) cfg.flow.lambda0 = need_number(fl, "lambda0", "flow", errors);
      if (fl.contains("method")) {
        std::string m = fl["method"].is_string() ? fl["method"].get<std::string>() : "";
        if (m == "euler") cfg.flow.method = FlowMethod::ProjectedEuler;
        else if (m == "rk4") cfg.flow.method = FlowMethod::ProjectedRK4;
        else errors.push_back("flow.method (euler | rk4)");
      }
      if (!(cfg.flow.dt > 0)) errors.push_back("flow.dt (must be positive)");
      if (!(cfg.flow.T >= cfg.flow.dt)) errors.push_back("flow.T (must be >= dt)");
      if (cfg.flow.lambda0 < 0 || cfg.flow.lambda0 > 1)
        errors.push_back("flow.lambda0 (must lie in [0,1])");
    }
  } else if (cfg.mode == RunConfig::Mode::Flow) {
    errors.push_back("flow (required when mode is 'flow')");
  }

  // --- output ------------------------------------------------------------
  if (doc.contains("output")) {
    const json& out = doc["output"];
    if (!out.is_object()) {
      errors.push_back("output (object required)");
    } else {
      reject_unknown_keys(out, {"dir"}, "output", errors);
      if (out.contains("dir")) {
        if (!out["dir"].is_string()) errors.push_back("output.dir (string required)");
        else cfg.output_dir = out["dir"].get<std::string>();
      }
    }
  }

  if (!errors.empty()) {
    std::string msg = "config schema violation:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg, errors);
  }
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string(), {"io"});
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()),
                      {"(json parse error)"});
  }
  return parse_config(doc);
}

RunInstance materialize(const RunConfig& config, std::optional<std::uint64_t> seed_override) {
  PresetParams params = config.preset_params;

  // Resolve drawn vector parameters like heterogeneous confidence bounds.
  std::vector<std::string> draw_keys;
  for (const auto& [k, v] : params.scalars) {
    if (k.rfind("__draw_lo_", 0) == 0) draw_keys.push_back(k.substr(10));
  }
  for (const std::string& key : draw_keys) {
    double lo = params.scalars.at("__draw_lo_" + key);
    double hi = params.scalars.at("__draw_hi_" + key);
    auto seed = static_cast<std::uint64_t>(params.scalars.at("__draw_seed_" + key));
    if (seed_override) seed = *seed_override + 1;  // decoupled from the init stream
    Rng rng(seed);
    params.vectors[key] = rng.uniform_vec(config.n, lo, hi);
    params.scalars.erase("__draw_lo_" + key);
    params.scalars.erase("__draw_hi_" + key);
    params.scalars.erase("__draw_seed_" + key);
  }

  RunInstance inst{build_preset(config.preset_name, config.n, params), {}, {}, 0, config, params};
  inst.dynamics = inst.model.dynamics;

  if (config.family) {
    inst.dynamics.family = family_from_name(*config.family);
    inst.dynamics.rule = inst.model.rule;
    if (inst.dynamics.family == Family::SubgradientSaddle ||
        inst.dynamics.family == Family::QuasiNewton) {
      inst.dynamics.rule = NeighborhoodRule::RepelWhenFar;
    }
  }
  if (config.max_iters) inst.dynamics.max_iters = *config.max_iters;
  if (config.tol) inst.dynamics.stop_tol = *config.tol;
  if (config.m) inst.dynamics.m = *config.m;
  if (config.backtracking) inst.dynamics.backtracking = *config.backtracking;
  if (config.schedule) {
    inst.dynamics.schedule = *config.schedule;
    if (inst.dynamics.schedule.kind == StepSchedule::Kind::ConstantEps) {
      inst.dynamics.schedule.n = config.n;
      if (!(inst.dynamics.schedule.G > 0) && inst.model.g->gradient_bound())
        inst.dynamics.schedule.G = *inst.model.g->gradient_bound();
    }
  }
  if (config.transfer) {
    inst.dynamics.transfers = std::make_shared<TransferFunctionSet>(
        TransferFunctionSet::uniform(config.n, config.transfer->kind, config.transfer->param));
    inst.dynamics.transfer_form = config.transfer->form;
  }
  if (config.mirror) inst.dynamics.mirror = *config.mirror;

  // Initial state.
  inst.seed = seed_override.value_or(config.init.seed);
  if (config.init.kind == RunConfig::Init::Kind::Uniform) {
    Rng rng(inst.seed);
    inst.x0 = rng.uniform_vec(config.n, config.init.lo, config.init.hi);
  } else {
    inst.x0 = config.init.values;
  }
  if (inst.model.init_floor) {
    for (double v : inst.x0) {
      if (!(v > *inst.model.init_floor)) {
        throw ConfigError("preset '" + config.preset_name + "' needs initial states > " +
                              std::to_string(*inst.model.init_floor),
                          {"init"});
      }
    }
  }
  return inst;
}

}  // namespace statenet
