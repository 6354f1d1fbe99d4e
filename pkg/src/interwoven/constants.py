"""Omega constant, Born-Oppenheimer scaling factors and level-counting formulas.

Units: hbar = m_heavy = 1 throughout the package; the mass ratio is
``A = m_light / m_heavy``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import DomainError, MissingReference

Source = Literal["adiabatic", "exact_reference", "hybrid"]

#: Exact (non-adiabatic) three-body scaling factors s0 for the tabulated mass ratios.
REFERENCE_S0: dict[float, float] = {
    0.1: 1.4682,
    0.05: 1.9194,
    0.04: 2.1142,
    0.03: 2.4067,
    0.02: 2.9084,
    0.01: 4.0612,
    0.001: 12.698,
}

#: Reference adiabatic s3 row and the e^{pi/s} rows that accompany the s0 table.
TABULATED_S3: dict[float, float] = {
    0.1: 1.1995,
    0.05: 1.7456,
    0.04: 1.9624,
    0.03: 2.2784,
    0.02: 2.8057,
    0.01: 3.9891,
    0.001: 12.675,
}
TABULATED_HALF_RATIO_S3: dict[float, float] = {
    0.1: 13.725,
    0.05: 6.0483,
    0.04: 4.9574,
    0.03: 3.9703,
    0.02: 3.0641,
    0.01: 2.1980,
    0.001: 1.2813,
}
TABULATED_HALF_RATIO_S0: dict[float, float] = {
    0.1: 8.4977,
    0.05: 5.1383,
    0.04: 4.4193,
    0.03: 3.6889,
    0.02: 2.9452,
    0.01: 2.1675,
    0.001: 1.2807,
}

#: Reference energy ratios e^{2 pi / s_N} obtained from s0 via the scaling-factor relation.
#: Keyed by mass ratio, then by N (N = 3 is e^{2 pi / s0}).
TABULATED_RATIOS: dict[float, dict[int, float]] = {
    0.04: {3: 19.5, 4: 7.95, 5: 5.39, 6: 4.29},
    0.03: {3: 13.6, 4: 6.21, 5: 4.42, 6: 3.61},
    0.02: {3: 8.67, 4: 4.57, 5: 3.44, 6: 2.91},
    0.01: {3: 4.70, 4: 2.97, 5: 2.43, 6: 2.16},
    0.001: {3: 1.64, 4: 1.42, 5: 1.33, 6: 1.28},
}


def omega_constant(tol: float = 1e-16) -> float:
    """Return the omega constant, the positive root of ``x = exp(-x)``.

    Newton iteration on ``f(x) = x - exp(-x)`` safeguarded by the bracket
    [0.5, 0.6]; a Newton step leaving the bracket is replaced by bisection.
    """
    lo, hi = 0.5, 0.6
    x = 0.55
    for _ in range(100):
        fx = x - math.exp(-x)
        if fx > 0.0:
            hi = x
        else:
            lo = x
        step = fx / (1.0 + math.exp(-x))
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * x_new:
            return x_new
        x = x_new
    return x


OMEGA = omega_constant()


def check_mass_ratio(A: float) -> float:
    """Validate a light/heavy mass ratio, which must lie in (0, 1)."""
    A = float(A)
    if not 0.0 < A < 1.0:
        raise DomainError(f"mass ratio must satisfy 0 < A < 1, got {A!r}")
    return A


def _check_n(N: int) -> int:
    if int(N) != N or N < 3:
        raise DomainError(f"particle count must be an integer >= 3, got {N!r}")
    return int(N)


@dataclass(frozen=True)
class ScalingFactor:
    """Strength parameter ``s`` of the attractive ``(s^2 + 1/4)/R^2`` potential."""

    s: float
    n_bosons: int = 3
    source: Source = "adiabatic"

    def __post_init__(self):
        if not self.s > 0.0:
            raise DomainError(f"scaling factor must be positive, got {self.s!r}")

    @property
    def ratio(self) -> float:
        """Energy ratio between adjacent levels, ``e^{2 pi / s}``."""
        return math.exp(2.0 * math.pi / self.s)

    @property
    def half_ratio(self) -> float:
        """Ratio of adjacent level momenta, ``e^{pi / s}``."""
        return math.exp(math.pi / self.s)

    def __float__(self) -> float:
        return self.s


def _value(s) -> float:
    return s.s if isinstance(s, ScalingFactor) else float(s)


def adiabatic_s(A: float, N: int = 3) -> ScalingFactor:
    """Adiabatic scaling factor s_N(A) = sqrt((2+A)/(4A) (N-2) gamma^2 - 1/4)."""
    A = check_mass_ratio(A)
    N = _check_n(N)
    radicand = (2.0 + A) / (4.0 * A) * (N - 2) * OMEGA**2 - 0.25
    if radicand <= 0.0:
        raise DomainError(f"no Efimov attraction for A={A}, N={N} (radicand {radicand:.3g})")
    return ScalingFactor(math.sqrt(radicand), N, "adiabatic")


def hybrid_s(s0, N: int) -> ScalingFactor:
    """N-body scaling factor from a three-body one: s_N^2 = (N-2) s0^2 + (N-3)/4.

    The result keeps the provenance of ``s0``: an adiabatic input stays
    adiabatic (the relation is exact for the closed form), an exact
    reference input becomes ``hybrid`` for N > 3.
    """
    N = _check_n(N)
    value = _value(s0)
    if not value > 0.0:
        raise DomainError(f"s0 must be positive, got {value!r}")
    src = s0.source if isinstance(s0, ScalingFactor) else "exact_reference"
    if N == 3:
        return ScalingFactor(value, 3, src)
    s = math.sqrt((N - 2) * value**2 + (N - 3) / 4.0)
    return ScalingFactor(s, N, "adiabatic" if src == "adiabatic" else "hybrid")


def reference_s0(A: float) -> ScalingFactor:
    """Tabulated exact three-body scaling factor; no interpolation."""
    A = check_mass_ratio(A)
    for key, value in REFERENCE_S0.items():
        if math.isclose(key, A, rel_tol=1e-12):
            return ScalingFactor(value, 3, "exact_reference")
    raise MissingReference(f"no reference s0 for mass ratio {A}; tabulated: {sorted(REFERENCE_S0)}")


def three_body_s(A: float) -> ScalingFactor:
    """Best available three-body factor: tabulated s0, else the adiabatic s3."""
    try:
        return reference_s0(A)
    except MissingReference:
        return adiabatic_s(A, 3)


def scaling_factor(A: float, N: int) -> ScalingFactor:
    """s_N built on :func:`three_body_s` (hybrid when s0 is tabulated)."""
    return hybrid_s(three_body_s(A), N)


def geometric_ratio(s, half: bool = False) -> float:
    """``e^{pi/s}`` when ``half`` else ``e^{2 pi/s}``; tends to 1 as s grows."""
    value = _value(s)
    if not value > 0.0:
        raise DomainError(f"scaling factor must be positive, got {value!r}")
    if math.isinf(value):
        return 1.0
    return math.exp((1.0 if half else 2.0) * math.pi / value)


def trimer_level_count(a: float, r1: float, s) -> int:
    """Number of three-body levels between the short cutoff ``r1`` and ``|a|``.

    ``floor((s/pi) ln(|a|/r1))``, zero when ``|a| <= r1``. ``a`` may be
    ``inf`` (unitary limit), giving an unbounded count.
    """
    if r1 <= 0.0 or a == 0.0:
        raise DomainError("lengths must be non-zero and r1 positive")
    ratio = abs(a) / r1
    if ratio <= 1.0:
        return 0
    if math.isinf(ratio):
        raise DomainError("level count diverges in the unitary limit")
    return math.floor(_value(s) / math.pi * math.log(ratio) + 1e-12)


def tetramer_level_count(B3_ground: float, r2: float, s4) -> int:
    """Four-body levels attached to the trimer ground state.

    ``floor(-(s4/pi) ln(sqrt(B3) r2))``; zero when ``sqrt(B3) r2 >= 1``.
    """
    if B3_ground <= 0.0 or r2 <= 0.0:
        raise DomainError("B3_ground and r2 must be positive")
    arg = math.sqrt(B3_ground) * r2
    if arg >= 1.0:
        return 0
    return math.floor(-_value(s4) / math.pi * math.log(arg) + 1e-12)
