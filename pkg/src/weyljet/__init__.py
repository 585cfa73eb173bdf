"""weyljet: truncated-series computer algebra for deformation quantization
and jet-level Lagrangian analysis.

The package is organized around a sparse truncated power-series kernel
(:mod:`weyljet.series`, :mod:`weyljet.stationary`), the Moyal/Weyl algebra
(:mod:`weyljet.weyl`), the formal Weil representation (:mod:`weyljet.weil`),
exact Maslov cocycle arithmetic (:mod:`weyljet.maslov`), chart/connection
verification (:mod:`weyljet.geometry`) and Lagrangian jet modules
(:mod:`weyljet.lagrangian`).  ``weyljet.cli`` exposes batch verification
suites over JSON configurations.
"""

from .series import (SeriesContext, TruncatedSeries, OscillatoryScalar,
                     SymmetricMatrix, SeriesError, compose, invert_map)
from .stationary import (gaussian_moment, gaussian_prefactor,
                         legendre_transform, stationary_phase,
                         fiber_stationary_phase, DegenerateHessianError)

__all__ = [
    "SeriesContext", "TruncatedSeries", "OscillatoryScalar", "SymmetricMatrix",
    "SeriesError", "compose", "invert_map",
    "gaussian_moment", "gaussian_prefactor", "legendre_transform",
    "stationary_phase", "fiber_stationary_phase", "DegenerateHessianError",
]

__version__ = "0.1.0"
