"""Interwoven geometric ladders and the level-ratio scaling curves.

A trimer ladder B3^(n) = e^{-2 n pi / s0} B3^(0) hosts, below each of its
levels, a tetramer ladder with ratio e^{2 pi / s4}. Each attached ladder is
cut where its levels reach the parent threshold: a state bound less deeply
than its parent trimer is larger than the trimer and no longer feels the
four-body attraction.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np

from .constants import (
    TABULATED_RATIOS,
    TABULATED_S3,
    TABULATED_HALF_RATIO_S3,
    REFERENCE_S0,
    ScalingFactor,
    adiabatic_s,
    hybrid_s,
    reference_s0,
    three_body_s,
)
from .eigensolver import BoundaryConditions, EnergyLadder, unitary_box_spectrum
from .errors import ConstraintViolation, DomainError, InsufficientLevels

CutoffRule = Literal["threshold", "none"]
Triple = Union[Literal["tracked", "deepest"], int]

# relative slack used when comparing closed-form levels
_REL = 1e-12


def _s(value) -> ScalingFactor:
    return value if isinstance(value, ScalingFactor) else ScalingFactor(float(value))


def _geometric(head: float, s: ScalingFactor, count: int) -> np.ndarray:
    return head * np.exp(-2.0 * math.pi / s.s * np.arange(count))


def trimer_ladder(B3_ground: float, s0, n_max: int) -> EnergyLadder:
    """Closed-form three-body ladder, levels n = 0..n_max."""
    if not B3_ground > 0.0:
        raise DomainError("B3_ground must be positive")
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    s0 = _s(s0)
    levels = _geometric(B3_ground, s0, n_max + 1)
    return EnergyLadder(levels, tuple(range(n_max + 1)), "bessel_analytic", s0.s)


def attached_ladder(parent_B: float, sN, B_top: float, cutoff_rule: CutoffRule = "threshold",
                    n_max: int = 1000) -> EnergyLadder:
    """Geometric ladder from ``B_top`` downwards, cut at the parent threshold.

    With ``cutoff_rule="threshold"`` levels with B <= parent_B are dropped;
    ``n_max`` caps the ladder when nothing cuts it (e.g. parent_B = 0).
    """
    sN = _s(sN)
    if parent_B < 0.0:
        raise DomainError("parent_B must be non-negative")
    if not B_top > parent_B:
        return EnergyLadder(np.empty(0), (), "bessel_analytic", sN.s)
    count = n_max + 1
    if cutoff_rule == "threshold" and parent_B > 0.0:
        # number of k with B_top e^{-2 pi k / s} > parent_B
        span = sN.s / (2.0 * math.pi) * math.log(B_top / parent_B)
        count = min(count, math.ceil(span * (1.0 - _REL)) if span > 0 else 0)
        count = max(count, 1)
    elif cutoff_rule not in ("threshold", "none"):
        raise DomainError(f"unknown cutoff rule {cutoff_rule!r}")
    levels = _geometric(B_top, sN, count)
    if cutoff_rule == "threshold":
        levels = levels[levels > parent_B]
    return EnergyLadder(levels, tuple(range(len(levels))), "bessel_analytic", sN.s)


def intermediate_state_count(sMinor, sMajor) -> int:
    """Most N-body levels that fit strictly between two adjacent (N-1)-body levels.

    ``floor(sMajor / sMinor)``, the log-width of the parent gap measured in
    units of the denser ladder's spacing.
    """
    lo, hi = _s(sMinor).s, _s(sMajor).s
    if hi < lo * (1.0 - _REL):
        raise DomainError("sMajor must not be smaller than sMinor")
    return math.floor(hi / lo + _REL)


@dataclass(frozen=True)
class SpectrumConfig:
    """Assembly options.

    ``head_margin`` scales the default head of each attached ladder,
    ``parent_B * e^{2 pi / s_N} * head_margin``. ``heads`` overrides it per
    parent level. ``n_trimers`` is the number of trimer levels kept and
    ``max_per_ladder`` caps ladders that nothing truncates.
    """

    n_trimers: int = 4
    head_margin: float = 1.0
    heads: dict = field(default_factory=dict)
    cutoff_rule: CutoffRule = "threshold"
    max_per_ladder: int = 50
    higher_n: int = 4
    s0: ScalingFactor | None = None


@dataclass(frozen=True)
class InterwovenSpectrum:
    A: float
    trimer: EnergyLadder
    tetramer_ladders: dict
    higher: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    def ladders(self):
        yield (3, None), self.trimer
        for i, lad in self.tetramer_ladders.items():
            yield (4, i), lad
        for N, by_parent in self.higher.items():
            for i, lad in by_parent.items():
                yield (N, i), lad

    def to_dict(self, precision: int | None = 10) -> dict:
        def ladder(lad: EnergyLadder, key) -> dict:
            d = lad.to_dict(precision)
            d["threshold"] = self.thresholds.get(key, 0.0)
            return d

        return {
            "A": self.A,
            "trimer": ladder(self.trimer, "3"),
            "tetramer_ladders": {str(i): ladder(l, f"4:{i}") for i, l in self.tetramer_ladders.items()},
            "higher": {
                str(N): {str(i): ladder(l, f"{N}:{i}") for i, l in by_parent.items()}
                for N, by_parent in self.higher.items()
            },
        }

    def to_json(self, precision: int | None = 10) -> str:
        return json.dumps(self.to_dict(precision), sort_keys=True, indent=2)


def _check_ratios(lad: EnergyLadder, label: str, tol: float = 1e-9) -> None:
    if len(lad) < 2:
        return
    target = math.exp(2.0 * math.pi / lad.s)
    r = lad.ratios()
    if np.any(np.abs(r / target - 1.0) > tol):
        raise ConstraintViolation(f"{label}: adjacent ratios deviate from e^(2 pi/s) = {target:.6g}")


def validate_spectrum(assembled: InterwovenSpectrum) -> None:
    """Check ladder geometry and the ordering of attached ladders.

    Raises :class:`ConstraintViolation` naming the first failed relation.
    """
    tri = assembled.trimer.levels
    if np.any(np.diff(tri) >= 0):
        raise ConstraintViolation("trimer levels are not strictly decreasing: B3^(n) > B3^(n+1)")
    _check_ratios(assembled.trimer, "trimer ladder")
    for i, lad in assembled.tetramer_ladders.items():
        _check_ratios(lad, f"tetramer ladder on B3^({i})")
        if len(lad) and np.any(lad.levels <= tri[i]):
            raise ConstraintViolation(f"B4,{i}^(n) > B3^({i}) violated: a tetramer lies above its threshold")
        if np.any(np.diff(lad.levels) >= 0):
            raise ConstraintViolation(f"tetramer ladder on B3^({i}) is not strictly decreasing")
    keys = sorted(assembled.tetramer_ladders)
    for i, j in zip(keys[:-1], keys[1:]):
        a, b = assembled.tetramer_ladders[i], assembled.tetramer_ladders[j]
        if len(a) and len(b) and not a.levels[0] > b.levels[0]:
            raise ConstraintViolation(f"tetramer heads out of order: B4,{i}^(0) > B4,{j}^(0) violated")
    s0 = assembled.trimer.s
    for i, lad in assembled.tetramer_ladders.items():
        if i == 0 or not len(lad):
            continue
        inside = np.count_nonzero((lad.levels > tri[i]) & (lad.levels < tri[i - 1]))
        limit = intermediate_state_count(s0, lad.s)
        if inside > limit:
            raise ConstraintViolation(
                f"{inside} tetramers between B3^({i - 1}) and B3^({i}) exceed the limit {limit}")
    for N, by_parent in assembled.higher.items():
        for i, lad in by_parent.items():
            _check_ratios(lad, f"{N}-body ladder on level {i}")
            parent = assembled.thresholds.get(f"{N}:{i}", 0.0)
            if len(lad) and np.any(lad.levels <= parent):
                raise ConstraintViolation(f"{N}-body ladder on level {i} lies above its threshold {parent}")


def interwoven_spectrum(A: float, B3_ground: float, config: SpectrumConfig | None = None) -> InterwovenSpectrum:
    """Trimer ladder plus tetramer (and optionally higher) ladders attached to each level.

    Higher-N ladders are attached to the levels of the (N-1)-body ladder on
    the trimer ground state, the shallowest threshold being the relevant
    (smallest-size) truncator.
    """
    cfg = config or SpectrumConfig()
    s0 = cfg.s0 or three_body_s(A)
    s4 = hybrid_s(s0, 4)
    tri = trimer_ladder(B3_ground, s0, cfg.n_trimers - 1)
    thresholds: dict = {"3": 0.0}
    tetra = {}
    for i, B3 in enumerate(tri.levels):
        head = cfg.heads.get(i, B3 * s4.ratio * cfg.head_margin)
        tetra[i] = attached_ladder(B3, s4, head, cfg.cutoff_rule, cfg.max_per_ladder)
        thresholds[f"4:{i}"] = float(B3)
    higher: dict = {}
    parent_lad = tetra[0]
    for N in range(5, cfg.higher_n + 1):
        sN = hybrid_s(s0, N)
        by_parent = {}
        for i, Bp in enumerate(parent_lad.levels):
            by_parent[i] = attached_ladder(Bp, sN, Bp * sN.ratio * cfg.head_margin, cfg.cutoff_rule,
                                           cfg.max_per_ladder)
            thresholds[f"{N}:{i}"] = float(Bp)
        higher[N] = by_parent
        parent_lad = by_parent.get(0, EnergyLadder(np.empty(0), (), "bessel_analytic", sN.s))
    assembled = InterwovenSpectrum(A, tri, tetra, higher, thresholds)
    validate_spectrum(assembled)
    return assembled


@dataclass(frozen=True)
class ScalingCurve:
    """Successive level ratios X = B^(n)/B^(n+1), Y = B^(n+1)/B^(n+2) versus cutoff."""

    points: list
    fixed_point: float
    N: int
    parent_level: int = 0
    s: float | None = None
    skipped: list = field(default_factory=list)
    level_indices: list = field(default_factory=list)

    def distances(self) -> np.ndarray:
        return np.array([math.hypot(X - self.fixed_point, Y - self.fixed_point) for _, X, Y in self.points])

    def to_csv(self, precision: int = 10, header_comment: str | None = None,
               reference_rows: Sequence[tuple[int, float]] = ()) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        w = csv.writer(buf, lineterminator="\n")
        fmt = lambda v: format(float(v), f".{precision}g")
        w.writerow(["N", "Rc", "X", "Y", "fixed_point"])
        for N, fp in reference_rows:
            w.writerow([N, "inf", fmt(fp), fmt(fp), fmt(fp)])
        for Rc, X, Y in self.points:
            w.writerow([self.N, _rc_text(Rc), fmt(X), fmt(Y), fmt(self.fixed_point)])
        return buf.getvalue()


def _rc_text(Rc) -> str:
    # echo integral cutoffs without a trailing ".0"
    return str(int(Rc)) if float(Rc).is_integer() else repr(float(Rc))


def scaling_curve(A: float, N: int, r_short: float, Rc_list: Sequence[float], triple: Triple = "tracked",
                  s0=None, step: float | None = None) -> ScalingCurve:
    """Level ratios of the N-body box spectrum for each long-range cutoff.

    ``triple`` selects which three consecutive levels (n, n+1, n+2) are used:

    * ``"tracked"`` (default): n is fixed by the smallest cutoff as the
      shallowest complete triple there, and then followed by index. As the
      cutoff grows these levels move away from the outer wall and the
      ratios converge to the fixed point.
    * ``"deepest"``: n = 0 at every cutoff. These levels sit against the
      short-range wall, so their ratios settle to values set by the wall
      and not the fixed point.
    * an integer: that n at every cutoff.

    Cutoffs with fewer than three levels (or fewer than n + 3) are skipped
    and reported in ``skipped``.
    """
    if N < 3:
        raise DomainError("N must be >= 3")
    sN = hybrid_s(s0 if s0 is not None else three_body_s(A), N) if N > 3 else _s(s0 or three_body_s(A))
    fp = sN.ratio
    cutoffs = [float(r) for r in Rc_list]
    if not cutoffs:
        raise DomainError("Rc_list must not be empty")
    order = sorted(cutoffs)
    ladders = {}
    skipped = []
    for Rc in order:
        if not Rc > r_short:
            skipped.append((Rc, "cutoff not beyond r_short"))
            continue
        lad = unitary_box_spectrum(sN, BoundaryConditions(r_short, Rc), 10_000, step=step)
        if len(lad) < 3:
            skipped.append((Rc, f"only {len(lad)} levels"))
            continue
        ladders[Rc] = lad
    if triple == "tracked":
        n = len(ladders[min(ladders)]) - 3 if ladders else 0
    elif triple == "deepest":
        n = 0
    elif isinstance(triple, (int, np.integer)) and triple >= 0:
        n = int(triple)
    else:
        raise DomainError(f"unknown triple selection {triple!r}")
    by_rc = {}
    for Rc, lad in ladders.items():
        if len(lad) < n + 3:
            skipped.append((Rc, f"only {len(lad)} levels, need {n + 3}"))
            continue
        B = lad.levels
        by_rc[Rc] = (Rc, B[n] / B[n + 1], B[n + 1] / B[n + 2])
    points = [by_rc[Rc] for Rc in cutoffs if Rc in by_rc]
    for Rc, reason in skipped:
        warnings.warn(f"scaling curve: skipped Rc={Rc}: {reason}", stacklevel=2)
    if not points:
        raise InsufficientLevels("no cutoff produced three levels")
    return ScalingCurve(points, fp, N, 0, sN.s, skipped, [n] * len(points))


def fixed_points(A: float, N_values: Sequence[int] = range(3, 9), s0=None) -> list[tuple[int, float]]:
    """(N, e^{2 pi / s_N}) for each N, the Y = X markers of the scaling plot."""
    base = s0 if s0 is not None else three_body_s(A)
    return [(N, hybrid_s(base, N).ratio) for N in N_values]


@dataclass(frozen=True)
class TableRow:
    label: str
    A: float
    computed: float
    reference: float | None

    @property
    def deviation(self) -> float | None:
        return None if self.reference is None else self.computed - self.reference


def ratio_table(A_list: Sequence[float], N_max: int) -> list[TableRow]:
    """s0 and e^{2 pi / s_N} (N = 3..N_max) from tabulated s0 for each A."""
    rows = []
    for A in A_list:
        s0 = reference_s0(A)
        rows.append(TableRow("s0", A, s0.s, REFERENCE_S0[_key(REFERENCE_S0, A)]))
        tabulated = TABULATED_RATIOS.get(_key(TABULATED_RATIOS, A), {})
        for N in range(3, N_max + 1):
            rows.append(TableRow(f"e^(2pi/s{N})", A, hybrid_s(s0, N).ratio, tabulated.get(N)))
    return rows


def adiabatic_table(A_list: Sequence[float] | None = None) -> list[TableRow]:
    """Adiabatic s3 and e^{pi/s3} next to the reference values."""
    A_list = sorted(TABULATED_S3, reverse=True) if A_list is None else A_list
    rows = []
    for A in A_list:
        s3 = adiabatic_s(A, 3)
        k = _key(TABULATED_S3, A)
        rows.append(TableRow("s3", A, s3.s, TABULATED_S3.get(k)))
        rows.append(TableRow("e^(pi/s3)", A, s3.half_ratio, TABULATED_HALF_RATIO_S3.get(k)))
    return rows


def _key(table: dict, A: float):
    for k in table:
        if math.isclose(k, A, rel_tol=1e-12):
            return k
    return None
