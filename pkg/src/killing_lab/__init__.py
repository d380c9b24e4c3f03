"""Numerical laboratory for Killing spinors and the stability of Einstein metrics.

Submodules:

- :mod:`~killing_lab.clifford`: Clifford representations, volume element, hat isomorphism
- :mod:`~killing_lab.geometry`: chart and homogeneous backends, frames, connections, curvature
- :mod:`~killing_lab.tensorfield`: symmetric 2-tensors, Einstein operator, TT checks
- :mod:`~killing_lab.spinorfield`: spin connection, Killing spinors, Dirac operator, Bochner formula
- :mod:`~killing_lab.warped`: warped products with type-I imaginary Killing spinors
- :mod:`~killing_lab.sasaki`: circle bundles over Kaehler bases and the instability certificate
- :mod:`~killing_lab.harness`: test matrix, reports, CLI plumbing
"""

from .clifford import CliffordRep, build_rep, hat_isomorphism, volume_element
from .geometry import ChartPatch, HomogeneousFrame, curvature, round_sphere, su2, warped_flat
from .spinorfield import KillingConstant, SpinorField, bochner_residual, killing_residual
from .warped import build_type1_spinor, build_warped
from .sasaki import build_base, build_total, instability_certificate
from .harness import emit_report, run_suite

__version__ = "0.1.0"

__all__ = [
    "CliffordRep",
    "build_rep",
    "hat_isomorphism",
    "volume_element",
    "ChartPatch",
    "HomogeneousFrame",
    "curvature",
    "round_sphere",
    "su2",
    "warped_flat",
    "KillingConstant",
    "SpinorField",
    "bochner_residual",
    "killing_residual",
    "build_type1_spinor",
    "build_warped",
    "build_base",
    "build_total",
    "instability_certificate",
    "emit_report",
    "run_suite",
]
