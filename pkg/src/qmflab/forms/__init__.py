"""Concrete form families: cotangent sums, Kontsevich phi, Eichler integrals, A_{k,D}."""

from .akd import AKD_CONVENTION, AkdResult, a_kd
from .cotangent import (
    ash0_main,
    ash3_correction,
    ash_main,
    coprime_residues,
    cotangent_c,
    cotangent_c_tilde,
    cotangent_ext_pos,
    cotangent_h,
    cotangent_scan,
    cotangent_spec,
    is_positive_odd,
)
from .eichler import (
    delta_coefficients,
    delta_spec,
    deligne_tail,
    eichler_h,
    eichler_spec,
    eichler_tilde,
    load_coefficients,
)
from .kontsevich import (
    TWIST24,
    kontsevich_h,
    kontsevich_phi,
    kontsevich_phistar,
    kontsevich_scan,
    kontsevich_spec,
)

__all__ = [
    "AkdResult",
    "a_kd",
    "ash0_main",
    "ash3_correction",
    "ash_main",
    "coprime_residues",
    "cotangent_c",
    "cotangent_c_tilde",
    "cotangent_ext_pos",
    "cotangent_h",
    "cotangent_scan",
    "cotangent_spec",
    "is_positive_odd",
    "delta_coefficients",
    "delta_spec",
    "deligne_tail",
    "eichler_h",
    "eichler_spec",
    "eichler_tilde",
    "load_coefficients",
    "TWIST24",
    "kontsevich_h",
    "kontsevich_phi",
    "kontsevich_phistar",
    "kontsevich_scan",
    "kontsevich_spec",
]
