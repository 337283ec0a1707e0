#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "statenet/flow.hpp"
#include "statenet/harness.hpp"
#include "statenet/models.hpp"
#include "statenet/rng.hpp"

namespace py = pybind11;
using namespace statenet;

namespace {

PresetParams params_from_dict(const py::dict& d) {
  PresetParams p;
  for (auto item : d) {
    std::string key = py::cast<std::string>(item.first);
    if (py::isinstance<py::float_>(item.second) || py::isinstance<py::int_>(item.second)) {
      p.scalars[key] = py::cast<double>(item.second);
    } else if (key == "weights") {
      for (auto row : py::cast<py::list>(item.second)) {
        for (auto v : py::cast<py::list>(row)) p.matrix.push_back(py::cast<double>(v));
      }
    } else {
      p.vectors[key] = py::cast<Vec>(item.second);
    }
  }
  return p;
}

DualNetwork dual_from_flat(int n, const Vec& flat) {
  DualNetwork lam(n);
  if (static_cast<int>(flat.size()) != lam.pair_count())
    throw EvaluationError("lambda must have n(n-1) entries");
  for (int k = 0; k < lam.pair_count(); ++k) lam.flat(k) = flat[static_cast<std::size_t>(k)];
  return lam;
}

Vec flat_from_dual(const DualNetwork& lam) {
  Vec out(static_cast<std::size_t>(lam.pair_count()));
  for (int k = 0; k < lam.pair_count(); ++k) out[static_cast<std::size_t>(k)] = lam.flat(k);
  return out;
}

LyapunovFamily lyapunov_family_from_name(const std::string& name) {
  if (name == "majorize_lagrangian") return LyapunovFamily::MajorizeLagrangian;
  if (name == "asymmetric_min_sum") return LyapunovFamily::AsymmetricMinSum;
  if (name == "transfer_integral") return LyapunovFamily::TransferIntegral;
  if (name == "penalty") return LyapunovFamily::Penalty;
  throw ConfigError("unknown Lyapunov family: " + name);
}

py::dict ledger_dict(const DriftLedger& ledger) {
  py::dict d;
  d["violations"] = ledger.violations;
  d["max_violation"] = ledger.max_violation;
  d["observational_increases"] = ledger.observational_increases;
  d["significant_increases"] = ledger.significant_increases;
  d["tie_hits"] = ledger.tie_hits;
  d["strict_decrease_exceptions"] = ledger.strict_decrease_exceptions;
  d["domain_violations"] = ledger.domain_violations;
  d["max_roundtrip_error"] = ledger.max_roundtrip_error;
  d["iterations"] = static_cast<int>(ledger.entries.size());
  return d;
}

}  // namespace

PYBIND11_MODULE(_statenet, m) {
  m.doc() = "state-dependent network dynamics: simulation and verification core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_RuntimeError);

  py::class_<ModelPreset>(m, "Model")
      .def_property_readonly("name", [](const ModelPreset& p) { return p.name; })
      .def_property_readonly("n", &ModelPreset::size)
      .def_property_readonly("rule",
                             [](const ModelPreset& p) {
                               return p.rule == NeighborhoodRule::AttractWhenClose ? "attract"
                                                                                   : "repel";
                             })
      .def_property_readonly("family",
                             [](const ModelPreset& p) { return family_name(p.dynamics.family); });

  py::class_<TrajectoryRecord>(m, "Trajectory")
      .def_property_readonly("states", [](const TrajectoryRecord& t) { return t.states; })
      .def_property_readonly("lyapunov", [](const TrajectoryRecord& t) { return t.lyapunov; })
      .def_property_readonly("status", [](const TrajectoryRecord& t) { return status_name(t.status); })
      .def_property_readonly("iterations", &TrajectoryRecord::iterations)
      .def_property_readonly("residual", &TrajectoryRecord::residual)
      .def_property_readonly("final_state", [](const TrajectoryRecord& t) { return t.final_state(); })
      .def_property_readonly("step_sizes",
                             [](const TrajectoryRecord& t) {
                               Vec out;
                               out.reserve(t.steps.size());
                               for (const auto& s : t.steps) out.push_back(s.step_size);
                               return out;
                             })
      .def_property_readonly("drifts", [](const TrajectoryRecord& t) {
        Vec out;
        out.reserve(t.steps.size());
        for (const auto& s : t.steps) out.push_back(s.drift);
        return out;
      });

  m.def("build_preset",
        [](const std::string& name, int n, const py::dict& params) {
          return build_preset(name, n, params_from_dict(params));
        },
        py::arg("name"), py::arg("n"), py::arg("params") = py::dict());
  m.def("preset_names", &preset_names);

  m.def("neighborhoods",
        [](const ModelPreset& model, const Vec& x) {
          return neighborhoods(x, *model.g, model.rule);
        },
        py::arg("model"), py::arg("x"));
  m.def("dual_from_state",
        [](const ModelPreset& model, const Vec& x) {
          return flat_from_dual(dual_from_state(x, *model.g, model.rule));
        },
        py::arg("model"), py::arg("x"));

  m.def("lagrangian_value",
        [](const ModelPreset& model, const Vec& x, const Vec& lam, bool halved) {
          return lagrangian_value(x, dual_from_flat(model.size(), lam), *model.g, model.f,
                                  halved ? PairSumForm::SymmetricHalved : PairSumForm::Ordered);
        },
        py::arg("model"), py::arg("x"), py::arg("lam"), py::arg("halved") = true);
  m.def("lyapunov",
        [](const ModelPreset& model, const Vec& x, const std::string& family) {
          return lyapunov(x, *model.g, model.f, lyapunov_family_from_name(family),
                          model.dynamics.transfers.get());
        },
        py::arg("model"), py::arg("x"), py::arg("family") = "majorize_lagrangian");
  m.def("penalty_phi",
        [](const ModelPreset& model, const Vec& x) { return penalty_phi(x, *model.g, model.f); },
        py::arg("model"), py::arg("x"));
  m.def("penalty_subgradient",
        [](const ModelPreset& model, const Vec& x) {
          return penalty_subgradient(x, *model.g, model.f);
        },
        py::arg("model"), py::arg("x"));
  m.def("sorted_gap_vector", &sorted_gap_vector, py::arg("x"));

  m.def("step",
        [](const ModelPreset& model, const Vec& x) {
          const DynamicsSpec& spec = model.dynamics;
          NeighborSets nb = neighborhoods(x, *model.g, spec.effective_rule());
          switch (spec.family) {
            case Family::BcdMajorize:
              return step_bcd_majorize(x, *model.g, model.f, spec.m, nb);
            case Family::ExactQuadratic:
              return step_exact_quadratic(x, spec.exact, nb);
            case Family::Mirror:
              return step_mirror(x, *model.g, model.f, *spec.mirror, nb);
            case Family::Asymmetric:
              return step_asymmetric(x, *model.g, model.f, spec.m, nb);
            case Family::Transfer:
              return step_transfer(x, *model.g, *spec.transfers, spec.m, spec.transfer_form);
            case Family::SubgradientSaddle:
              return step_subgradient(x, *model.g, model.f, spec.schedule, 0, nb).first;
            case Family::QuasiNewton:
              return step_quasi_newton(x, *model.g, model.f, spec.schedule.alpha(0, 1.0), nb);
          }
          throw EvaluationError("unknown family");
        },
        py::arg("model"), py::arg("x"), "One synchronous update under the model's recommended rule");

  m.def("run",
        [](const ModelPreset& model, const Vec& x0, int max_iters, double tol,
           const std::string& family) {
          DynamicsSpec spec = model.dynamics;
          if (max_iters >= 0) spec.max_iters = max_iters;
          if (tol > 0) spec.stop_tol = tol;
          if (!family.empty()) {
            spec.family = family_from_name(family);
            spec.rule.reset();
          }
          return run(spec, x0, *model.g, model.f);
        },
        py::arg("model"), py::arg("x0"), py::arg("max_iters") = -1, py::arg("tol") = 0.0,
        py::arg("family") = "");

  m.def("monitor",
        [](const ModelPreset& model, const TrajectoryRecord& traj) {
          return ledger_dict(monitor(traj, model.dynamics, *model.g, model.f));
        },
        py::arg("model"), py::arg("trajectory"));

  m.def("analyze_equilibrium",
        [](const TrajectoryRecord& traj, double gap) {
          ClusterReport r = analyze_equilibrium(traj, gap);
          py::list clusters;
          for (const auto& c : r.clusters) {
            py::dict d;
            d["value"] = c.value;
            d["size"] = c.size;
            clusters.append(d);
          }
          py::dict out;
          out["clusters"] = clusters;
          out["min_separation"] = r.min_separation;
          out["residual"] = r.residual;
          out["diverged"] = r.diverged;
          return out;
        },
        py::arg("trajectory"), py::arg("gap_threshold"));

  m.def("project_box", &project_box, py::arg("a"), py::arg("lam"));
  m.def("integrate_flow",
        [](const ModelPreset& model, const Vec& x0, double lambda0, double dt, double T,
           int stride, const std::string& method) {
          FlowState s0(x0, DualNetwork(model.size(), lambda0));
          FlowMethod fm =
              method == "rk4" ? FlowMethod::ProjectedRK4 : FlowMethod::ProjectedEuler;
          FlowTrajectory traj = integrate(s0, *model.g, model.f, dt, T, fm, stride);
          py::list samples;
          for (const auto& s : traj.samples) {
            py::dict d;
            d["t"] = s.t;
            d["x"] = s.x;
            d["lam"] = flat_from_dual(s.lambda);
            samples.append(d);
          }
          py::dict out;
          out["samples"] = samples;
          out["diverged"] = traj.diverged;
          return out;
        },
        py::arg("model"), py::arg("x0"), py::arg("lambda0") = 0.0, py::arg("dt") = 1e-3,
        py::arg("T") = 50.0, py::arg("stride") = 1, py::arg("method") = "euler");

  m.def("uniform_states",
        [](int n, double lo, double hi, std::uint64_t seed) {
          Rng rng(seed);
          return rng.uniform_vec(n, lo, hi);
        },
        py::arg("n"), py::arg("lo"), py::arg("hi"), py::arg("seed"),
        "The deterministic initial-state sampler the CLI uses");
}
