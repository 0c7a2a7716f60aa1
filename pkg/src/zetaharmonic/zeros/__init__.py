"""Zero-ordinate pipeline: Hardy Z evaluation, location, certification,
and table persistence."""

from .certify import certify_range
from .hardy import hardy_z
from .pipeline import build_zero_table
from .search import locate_and_refine, zero_sign_at
from .table import (
    CompletenessCertificate,
    ZeroOrdinate,
    ZeroTable,
    load_zero_table,
    save_zero_table,
    zero_table_io,
)
from .theta import gram_point, theta_ball, theta_deriv_ball

__all__ = [
    "gram_point",
    "theta_ball",
    "theta_deriv_ball",
    "hardy_z",
    "locate_and_refine",
    "zero_sign_at",
    "certify_range",
    "build_zero_table",
    "ZeroOrdinate",
    "ZeroTable",
    "CompletenessCertificate",
    "save_zero_table",
    "load_zero_table",
    "zero_table_io",
]
