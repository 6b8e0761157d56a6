"""Exact integrability and linearizability checks for resonant 3D Lotka-Volterra systems.

Layers, bottom up:

* ``poly``, ``groebner``, ``linalg``, ``expr``: exact rational polynomial algebra
* ``system``, ``darboux``: the LV vector field and Darboux calculus
* ``series``: truncated power series, resonant first integrals, linearization
* ``obstructions``: parametric obstruction sets and reduction modulo case ideals
* ``catalog``: the condition cases and their verification harness
* ``cli``: the ``lvint`` command
"""

__version__ = "0.1.0"

from .darboux import (DarbouxFunction, NotInvariant, find_darboux_combination, parse_darboux,
                      verify_relation)
from .groebner import GroebnerBasis, buchberger, normal_form
from .poly import PARAMS, XYZ, MonomialOrder, Poly, Ring
from .series import (TruncatedSeries, linearize_system, resonant_series_integral,
                     theorem1_construct)
from .system import InvalidResonance, LVSystem, dual_transform

__all__ = [
    "__version__",
    "DarbouxFunction", "NotInvariant", "find_darboux_combination", "parse_darboux", "verify_relation",
    "GroebnerBasis", "buchberger", "normal_form",
    "PARAMS", "XYZ", "MonomialOrder", "Poly", "Ring",
    "TruncatedSeries", "linearize_system", "resonant_series_integral", "theorem1_construct",
    "InvalidResonance", "LVSystem", "dual_transform",
]
