"""Rigorous evaluation of the harmonic sum over Riemann zeta zero ordinates.

The package is organised bottom-up:

- ``enclosure``: self-validating midpoint-radius arithmetic (the numeric
  substrate everything else certifies against);
- ``zeros``: the Hardy Z function, zero location and refinement, Turing-style
  completeness certification, and zero-table persistence;
- ``counting``: explicit zero-counting bounds (main term, remainder bounds);
- ``estimator``: the harmonic-sum estimators built from certified zeros and
  the counting bounds;
- ``cli``: a command-line front end over the above.
"""

from .enclosure import Enclosure, enc_apply, enc_const
from .errors import (
    AmbiguityError,
    CertificationError,
    DomainError,
    InsufficientPrecisionError,
    RefinementError,
    TableFormatError,
    ZetaHarmonicError,
)
from .counting import BoundParams, DEFAULT_PARAMS, big_l, q_from_zeros
from .estimator import (
    HEstimate,
    accelerated_estimate,
    buthe_check,
    g_sum,
    hassani_shift,
    naive_estimate,
    shift_constant,
)
from .zeros import (
    CompletenessCertificate,
    ZeroOrdinate,
    ZeroTable,
    build_zero_table,
    certify_range,
    hardy_z,
    load_zero_table,
    locate_and_refine,
    save_zero_table,
)

__version__ = "0.1.0"

__all__ = [
    "Enclosure",
    "enc_apply",
    "enc_const",
    "ZetaHarmonicError",
    "DomainError",
    "InsufficientPrecisionError",
    "RefinementError",
    "CertificationError",
    "AmbiguityError",
    "TableFormatError",
    "BoundParams",
    "DEFAULT_PARAMS",
    "big_l",
    "q_from_zeros",
    "hardy_z",
    "locate_and_refine",
    "certify_range",
    "build_zero_table",
    "ZeroOrdinate",
    "ZeroTable",
    "CompletenessCertificate",
    "save_zero_table",
    "load_zero_table",
    "HEstimate",
    "g_sum",
    "naive_estimate",
    "accelerated_estimate",
    "shift_constant",
    "hassani_shift",
    "buthe_check",
    "__version__",
]
