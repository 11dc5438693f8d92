"""Asymptotic DIQKD key rate and final key length.

r = 1 - h(Q) - h((1 + sqrt(S^2/4 - 1)) / 2)

The second term bounds Eve's information from the CHSH value. Along the
isotropic line S = 2*sqrt(2)*(1 - 2Q) the rate reaches zero near Q = 7.1%.
No finite-key correction is applied.
"""

import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np
from scipy.special import entr

from diqsim.config import TSIRELSON_BOUND
from diqsim.errors import ParameterError, ProtocolAbort

# S values this far above 2*sqrt(2) are treated as statistical overshoot
TSIRELSON_TOLERANCE = 1e-9

ArrayLike = Union[float, np.ndarray]


def binary_entropy(p: ArrayLike) -> ArrayLike:
    """h(p) = -p log2 p - (1-p) log2 (1-p), with h(0) = h(1) = 0.

    Accepts scalars or arrays.

    Raises:
        ParameterError: If any p lies outside [0, 1].
    """
    values = np.asarray(p, dtype=float)
    if np.any((values < 0.0) | (values > 1.0)) or np.any(np.isnan(values)):
        raise ParameterError(f"binary entropy needs p in [0, 1], got {p}")
    h = (entr(values) + entr(1.0 - values)) / math.log(2)
    return float(h) if h.ndim == 0 else h


def eve_information(s: float) -> float:
    """h((1 + sqrt(S^2/4 - 1)) / 2), Eve's information bound for CHSH value S > 2."""
    # clip: 2*sqrt(2) squared is not exactly 8 in floating point
    root = math.sqrt(min(max(s * s / 4.0 - 1.0, 0.0), 1.0))
    return binary_entropy((1.0 + root) / 2.0)


@dataclass(frozen=True)
class KeyRateReport:
    """Key rate and final key length for one run.

    Attributes:
        s_value: CHSH value used for the bound.
        qber: Error rate used for the bound.
        leaked_bits: Reconciliation leakage charged.
        sifted_len: Sifted key length.
        rate_per_bit: Asymptotic rate per sifted bit (may be negative).
        final_len: Secret key length after all deductions.
    """

    s_value: float
    qber: float
    leaked_bits: int
    sifted_len: int
    rate_per_bit: float
    final_len: int

    def to_dict(self) -> dict:
        return asdict(self)


def secure_length(
    sifted_len: int,
    qber: float,
    s_value: float,
    leaked_bits: int,
    tag_bits: int,
    margin_bits: int,
    use_measured_leakage: bool = True,
) -> int:
    """Final key length.

    With measured leakage: floor(n(1 - h_S) - leaked - t - margin); otherwise
    the asymptotic n*h(Q) replaces the leaked bits. Zero whenever the
    asymptotic rate is not positive.
    """
    h_s = eve_information(s_value)
    if 1.0 - binary_entropy(qber) - h_s <= 0.0:
        return 0
    if use_measured_leakage:
        raw = sifted_len * (1.0 - h_s) - leaked_bits
    else:
        raw = sifted_len * (1.0 - binary_entropy(qber) - h_s)
    return max(0, math.floor(raw - tag_bits - margin_bits))


def key_rate(
    s: float,
    q: float,
    leaked_bits: int = 0,
    sifted_len: int = 0,
    tag_bits: int = 0,
    margin_bits: int = 0,
    use_measured_leakage: bool = True,
) -> KeyRateReport:
    """Secret key rate from the CHSH value and QBER.

    Args:
        s: CHSH value in (2, 2*sqrt(2)].
        q: QBER in [0, 0.5).
        leaked_bits: Reconciliation leakage.
        sifted_len: Sifted key length.
        tag_bits: Verification tag length.
        margin_bits: Security margin.
        use_measured_leakage: Charge leaked_bits instead of n*h(q).

    Returns:
        KeyRateReport.

    Raises:
        ProtocolAbort: If s <= 2 (no certified key).
        ParameterError: If s exceeds Tsirelson's bound or q is out of range.
    """
    if s <= 2.0:
        raise ProtocolAbort("no_bell_violation", s_value=s)
    if s > TSIRELSON_BOUND + TSIRELSON_TOLERANCE:
        raise ParameterError(f"S={s} exceeds Tsirelson's bound {TSIRELSON_BOUND:.6f}")
    if not 0.0 <= q < 0.5:
        raise ParameterError(f"q must lie in [0, 0.5), got {q}")
    if leaked_bits < 0 or sifted_len < 0:
        raise ParameterError("leaked_bits and sifted_len must be non-negative")

    rate = 1.0 - binary_entropy(q) - eve_information(s)
    final_len = secure_length(
        sifted_len, q, s, leaked_bits, tag_bits, margin_bits, use_measured_leakage
    )
    return KeyRateReport(
        s_value=s,
        qber=q,
        leaked_bits=leaked_bits,
        sifted_len=sifted_len,
        rate_per_bit=rate,
        final_len=final_len,
    )


def isotropic_chsh(q: float) -> float:
    """CHSH value on the isotropic line, S = 2*sqrt(2)*(1 - 2q)."""
    return TSIRELSON_BOUND * (1.0 - 2.0 * q)
