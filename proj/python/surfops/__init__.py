"""Meshfree surface differential operators on point clouds.

Thin wrapper around the C++ extension module. The main operations are
gen_nodes, build_operator, the field_* samplers, relative_errors, fit_order
and cost_model.
"""

try:
    from ._surfops import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:  # pragma: no cover - build-tree layout
    from _surfops import *  # noqa: F401,F403

__version__ = "0.1.0"
