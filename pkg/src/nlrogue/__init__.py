"""Rogue-wave construction and verification for time-mirrored nonlocal NLS.

The construction side builds Nth-order rational (and exponential-rational)
solutions by a degenerate dressing chain over a plane-wave background; the
verification side checks them against the equation itself with no shared
machinery beyond point evaluation.
"""

__version__ = "0.1.0"

from .chain import (
    DELTA_POLE,
    UPDATE_SIGN,
    ChainResult,
    PairedValue,
    SingularPoint,
    rogue_point,
)
from .expansion import (
    WaveSpec,
    expansion_vectors,
    generating_wave,
    scalar_wave,
    series_tables,
    vector_wave,
    wave_omegas,
)
from .fields import Field, FieldGrid, compute_field
from .jets import Jet, NumericOverflowError
from .laxcore import SpectralSetup, fundamental_solution

__all__ = [
    "DELTA_POLE",
    "UPDATE_SIGN",
    "ChainResult",
    "Field",
    "FieldGrid",
    "Jet",
    "NumericOverflowError",
    "PairedValue",
    "SingularPoint",
    "SpectralSetup",
    "WaveSpec",
    "compute_field",
    "expansion_vectors",
    "fundamental_solution",
    "generating_wave",
    "rogue_point",
    "scalar_wave",
    "series_tables",
    "vector_wave",
    "wave_omegas",
    "__version__",
]
