"""Light-particle binding kappa(R) and the heavy-heavy Born-Oppenheimer potential.

For a heavy-heavy separation R the light particle is bound with momentum
kappa solving ``(kappa - 1/a + R* kappa^2) R = exp(-kappa R)``. The
effective potential for N-2 light bosons is ``-(N-2) kappa^2 / nu`` with
``nu = 2/(2+A)``; its energy unit is hbar^2 / (2 m_light L^2). Multiply by
:func:`radial_scale` to express it in the hbar = m_heavy = 1 units of the
radial equation.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import OMEGA, check_mass_ratio
from .errors import DomainError, IllConditionedFit, NoBoundLevel, SolverError

EPSILON_REFERENCE = 0.185


@dataclass(frozen=True)
class SystemParams:
    """Physical configuration.

    ``a`` is the light-heavy scattering length; ``unitary=True`` (or an
    infinite ``a``) selects the unitary limit without forming ``1/a``.
    """

    A: float
    N: int = 3
    a: float = math.inf
    Rstar: float = 0.0
    unitary: bool = False

    def __post_init__(self):
        check_mass_ratio(self.A)
        if int(self.N) != self.N or self.N < 3:
            raise DomainError(f"N must be an integer >= 3, got {self.N!r}")
        if self.a == 0.0 or math.isnan(self.a):
            raise DomainError("scattering length must be non-zero")
        if self.Rstar < 0.0:
            raise DomainError("R* must be non-negative")
        if math.isinf(self.a):
            object.__setattr__(self, "unitary", True)

    @property
    def inv_a(self) -> float:
        return 0.0 if self.unitary else 1.0 / self.a

    @property
    def nu(self) -> float:
        """Reduced-mass ratio mu_(2 heavy, light) / m_light."""
        return 2.0 / (2.0 + self.A)

    @property
    def threshold(self) -> float:
        """Large-R limit of the effective potential (units hbar^2 / (2 m_light L^2))."""
        if self.unitary or self.a < 0.0:
            return 0.0
        kappa_inf = _kappa_infinity(self.inv_a, self.Rstar)
        return -(self.N - 2) * kappa_inf**2 / self.nu


def _kappa_infinity(inv_a: float, Rstar: float) -> float:
    # positive root of kappa + R* kappa^2 = 1/a
    if inv_a <= 0.0:
        return 0.0
    if Rstar == 0.0:
        return inv_a
    return 2.0 * inv_a / (1.0 + math.sqrt(1.0 + 4.0 * Rstar * inv_a))


@dataclass(frozen=True)
class KappaSolution:
    R: float
    kappa: float
    residual: float


def _residual(kappa: float, R: float, inv_a: float, Rstar: float) -> float:
    return (kappa - inv_a + Rstar * kappa * kappa) * R - math.exp(-kappa * R)


def _solve(R: float, inv_a: float, Rstar: float, tol: float = 1e-13) -> KappaSolution:
    if not R > 0.0:
        raise DomainError(f"R must be positive, got {R!r}")
    if Rstar < 0.0:
        raise DomainError("R* must be non-negative")
    # at kappa = 0 the left side is -R/a and the right side is 1
    # (a few ulps of slack so that R == |a| is caught despite rounding in 1/a)
    if -R * inv_a >= 1.0 - 4e-16:
        raise NoBoundLevel(f"no light-particle bound state at R={R} (R >= |a|)", radius=-1.0 / inv_a)
    # the residual is strictly increasing in kappa, negative at the lower end
    lo = max(0.0, inv_a)
    hi = max(inv_a, 0.0) + (OMEGA + 1.0) / R
    while _residual(hi, R, inv_a, Rstar) < 0.0:  # pragma: no cover - bracket is analytic
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _residual(mid, R, inv_a, Rstar) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    k = 0.5 * (lo + hi)
    # Newton polish; derivative (1 + 2 R* k) R + R exp(-k R) > 0
    for _ in range(4):
        f = _residual(k, R, inv_a, Rstar)
        df = (1.0 + 2.0 * Rstar * k) * R + R * math.exp(-k * R)
        k_new = k - f / df
        if not k_new > 0.0:
            break
        k = k_new
    res = abs(_residual(k, R, inv_a, Rstar))
    if res > 1e-12 * max(1.0, (1.0 + Rstar * k) * k * R):
        raise SolverError(f"kappa root did not converge at R={R}: residual {res:.3g}")
    return KappaSolution(R, k, res)


def solve_kappa(R: float, a: float = math.inf) -> KappaSolution:
    """Root of ``(kappa - 1/a) R = exp(-kappa R)``; ``a = inf`` is unitary."""
    inv_a = 0.0 if math.isinf(a) else 1.0 / a
    if a == 0.0:
        raise DomainError("scattering length must be non-zero")
    return _solve(float(R), inv_a, 0.0)


def solve_kappa_narrow(R: float, a: float = math.inf, Rstar: float = 0.0) -> KappaSolution:
    """Root of ``(kappa - 1/a + R* kappa^2) R = exp(-kappa R)``."""
    if a == 0.0:
        raise DomainError("scattering length must be non-zero")
    inv_a = 0.0 if math.isinf(a) else 1.0 / a
    return _solve(float(R), inv_a, float(Rstar))


def kappa_closed_form(R, a: float, epsilon: float = EPSILON_REFERENCE):
    """Fitted interpolation ``1/a + (gamma/R + eps/a) exp(-R/a)`` (a > 0)."""
    if not a > 0.0:
        raise DomainError("closed form requires a > 0")
    R = np.asarray(R, dtype=float)
    out = 1.0 / a + (OMEGA / R + epsilon / a) * np.exp(-R / a)
    return float(out) if out.ndim == 0 else out


def default_epsilon_grid(a: float = 1.0, n: int = 50) -> np.ndarray:
    return a * np.logspace(-1.0, 1.0, n)


def fit_epsilon(a: float = 1.0, R_grid: Sequence[float] | None = None, objective: str = "minimax") -> float:
    """Fit the constant of :func:`kappa_closed_form` against exact roots.

    ``objective``:
      * ``"minimax"`` (default): minimise the largest relative error of kappa,
      * ``"relative_lsq"``: least squares of relative errors,
      * ``"lsq"``: unweighted least squares of kappa.

    The closed form is linear in epsilon, so both least-squares variants
    are solved directly. Warns :class:`IllConditionedFit` when the
    epsilon-carrying term is negligible on the whole grid.
    """
    if not a > 0.0:
        raise DomainError("fit requires a > 0")
    R = default_epsilon_grid(a) if R_grid is None else np.asarray(R_grid, dtype=float)
    exact = np.array([solve_kappa(r, a).kappa for r in R])
    decay = np.exp(-R / a)
    base = 1.0 / a + OMEGA / R * decay - exact
    basis = decay / a
    if basis.max() * a < 1e-8:
        warnings.warn("epsilon multiplies a vanishing term on this grid; fit is ill-conditioned",
                      IllConditionedFit, stacklevel=2)
    if objective in ("lsq", "relative_lsq"):
        w = np.ones_like(R) if objective == "lsq" else 1.0 / exact
        bw, cw = base * w, basis * w
        norm = float(cw @ cw)
        if norm == 0.0:
            return 0.0
        return float(-(bw @ cw) / norm)
    if objective == "minimax":
        # max_i |base_i + eps basis_i| / exact_i is convex and piecewise linear in eps
        rel_base, rel_basis = base / exact, basis / exact
        f = lambda e: float(np.max(np.abs(rel_base + e * rel_basis)))
        res = minimize_scalar(f, bounds=(-2.0, 2.0), method="bounded", options={"xatol": 1e-10})
        return float(res.x)
    raise ValueError(f"unknown objective {objective!r}")


def coulomb_coefficient(gamma: float = OMEGA, epsilon: float = EPSILON_REFERENCE) -> float:
    """Coefficient of the 1/(R a) term of kappa^2 at R << a: ``2 gamma (1 + eps - gamma)``."""
    return 2.0 * gamma * (1.0 + epsilon - gamma)


def kappa(params: SystemParams, R: float) -> float:
    return _solve(float(R), params.inv_a, params.Rstar).kappa


def effective_potential(params: SystemParams, R: float) -> float:
    """``-(N-2) kappa(R)^2 / nu`` with the exact root for kappa."""
    k = kappa(params, R)
    return -(params.N - 2) * k * k / params.nu


def radial_scale(A: float) -> float:
    """Factor converting E_eff (units hbar^2 / (2 m_light L^2)) to hbar = m_heavy = 1 units, 1/(2A)."""
    return 0.5 / check_mass_ratio(A)


@dataclass(frozen=True)
class PotentialProfile:
    """Effective potential tabulated on an increasing radial grid.

    ``merge_radius`` is set when the grid was cut at R = |a| (a < 0).
    """

    params: SystemParams
    grid: np.ndarray
    values: np.ndarray
    threshold: float
    merge_radius: float | None = None
    extra: dict = field(default_factory=dict)

    def radial_values(self) -> np.ndarray:
        return self.values * radial_scale(self.params.A)

    def to_csv(self, precision: int = 10, header_comment: str | None = None) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        writer = csv.writer(buf, lineterminator="\n")
        names = ["R", "E_eff", "threshold", *self.extra]
        writer.writerow(names)
        fmt = lambda v: format(float(v), f".{precision}g")
        cols = [self.grid, self.values, np.full_like(self.grid, self.threshold)]
        cols += [np.broadcast_to(np.asarray(v, dtype=float), self.grid.shape) for v in self.extra.values()]
        for row in zip(*cols):
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()


def read_profile_csv(text: str) -> dict[str, np.ndarray]:
    """Parse a profile CSV (``#`` comment lines skipped) into named columns."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    rows = np.array([[float(v) for v in row] for row in reader])
    return {name: rows[:, i] for i, name in enumerate(header)}


def potential_profile(params: SystemParams, grid: Iterable[float]) -> PotentialProfile:
    """Tabulate :func:`effective_potential`.

    For a < 0 the table stops before R = |a|, where the light-particle
    level merges with the continuum; the merge radius is recorded.
    """
    grid = np.asarray(list(grid), dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
        raise DomainError("grid must be a non-empty, strictly increasing list of positive radii")
    merge = None
    values = []
    kept = []
    for R in grid:
        try:
            values.append(effective_potential(params, R))
        except NoBoundLevel as exc:
            merge = exc.radius
            break
        kept.append(R)
    if not kept:
        raise NoBoundLevel("no bound light-particle level anywhere on the grid", radius=merge)
    return PotentialProfile(params, np.array(kept), np.array(values), params.threshold, merge)
