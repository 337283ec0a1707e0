"""Multiagent dynamics over state-dependent networks.

The heavy lifting lives in the C++ extension; this package re-exports the
bound surface: presets, single steps, full runs, Lyapunov evaluation, drift
monitoring, cluster analysis, and the projected saddle flow.
"""

try:
    from ._statenet import *  # noqa: F401,F403  (wheel layout)
    from ._statenet import __doc__ as _core_doc
except ImportError:  # in-tree build: the extension sits on PYTHONPATH
    from _statenet import *  # noqa: F401,F403
    from _statenet import __doc__ as _core_doc

__all__ = [
    "Model",
    "Trajectory",
    "build_preset",
    "preset_names",
    "neighborhoods",
    "dual_from_state",
    "lagrangian_value",
    "lyapunov",
    "penalty_phi",
    "penalty_subgradient",
    "sorted_gap_vector",
    "step",
    "run",
    "monitor",
    "analyze_equilibrium",
    "project_box",
    "integrate_flow",
    "uniform_states",
]
