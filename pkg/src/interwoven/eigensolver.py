"""Bound states of the reduced radial equation between two hard walls.

    u'' + [(s^2 + 1/4)/R^2 - B] u = 0,   u(r_short) = u(r_long) = 0

(or u'' = [B + V(R)] u for a tabulated potential). With x = ln(R/r_short)
and u = e^{x/2} w the equation becomes w'' = [beta e^{2x} + q(x)] w with
beta = B r_short^2 and q = V R^2 + 1/4 (q = -s^2 for the pure 1/R^2 case).
The grid is uniform in x, so every log-period pi/s is sampled equally and
rescaling both walls by the same factor leaves the discrete problem
unchanged.

Levels are bracketed by bisection on the node count of the outward
solution (Sturm oscillation), then refined with Brent's method on the
matching determinant of outward and inward solutions at the turning point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from . import _kernels
from .bessel import besselk_zeros
from .constants import ScalingFactor
from .errors import DomainError, SolverError
from .potential import PotentialProfile, radial_scale

Method = Literal["numerov", "fd_oracle", "bessel_analytic"]

# outward decay (in e-folds of w) beyond the turning point after which the
# outer wall no longer affects a level; its influence is then ~exp(-2 * 40)
_DECAY_EFOLDS = 40.0


@dataclass(frozen=True)
class BoundaryConditions:
    r_short: float
    r_long: float

    def __post_init__(self):
        if not 0.0 < self.r_short < self.r_long:
            raise DomainError(f"need 0 < r_short < r_long, got {self.r_short}, {self.r_long}")

    @property
    def log_span(self) -> float:
        return math.log(self.r_long / self.r_short)

    def scaled(self, factor: float) -> "BoundaryConditions":
        return BoundaryConditions(self.r_short * factor, self.r_long * factor)


@dataclass(frozen=True)
class RadialProblem:
    """Either a 1/R^2 strength (s^2 + 1/4) or a tabulated potential, plus walls."""

    bc: BoundaryConditions
    strength: float | None = None
    profile: PotentialProfile | None = None

    def __post_init__(self):
        if (self.strength is None) == (self.profile is None):
            raise DomainError("give exactly one of strength or profile")
        if self.profile is not None:
            lo, hi = self.profile.grid[0], self.profile.grid[-1]
            if self.bc.r_short < lo * (1 - 1e-12) or self.bc.r_long > hi * (1 + 1e-12):
                raise DomainError(f"walls [{self.bc.r_short}, {self.bc.r_long}] outside profile grid [{lo}, {hi}]")

    @classmethod
    def unitary(cls, s, bc: BoundaryConditions) -> "RadialProblem":
        s = s.s if isinstance(s, ScalingFactor) else float(s)
        return cls(bc, strength=s * s + 0.25)

    @property
    def s(self) -> float | None:
        if self.strength is None or self.strength <= 0.25:
            return None
        return math.sqrt(self.strength - 0.25)

    def q_values(self, x: np.ndarray) -> np.ndarray:
        """q(x) = V(R) R^2 + 1/4 at x = ln(R / r_short)."""
        if self.strength is not None:
            return np.full_like(x, 0.25 - self.strength)
        prof = self.profile
        t = np.log(prof.grid)
        vr2 = prof.radial_values() * prof.grid**2
        spline = CubicSpline(t, vr2)
        return spline(x + math.log(self.bc.r_short)) + 0.25

    @property
    def beta_floor(self) -> float:
        """Smallest admissible beta: bound below the continuum threshold."""
        if self.profile is None:
            return 0.0
        thr = self.profile.threshold * radial_scale(self.profile.params.A)
        return max(0.0, -thr) * self.bc.r_short**2


@dataclass(frozen=True)
class EnergyLadder:
    """Binding magnitudes B^(0) > B^(1) > ... (units hbar^2 / (m_heavy L^2))."""

    levels: np.ndarray
    node_counts: tuple
    method: Method
    s: float | None = None
    r_short: float | None = None
    r_long: float | None = None
    info: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.levels)

    def ratios(self) -> np.ndarray:
        return self.levels[:-1] / self.levels[1:]

    def to_dict(self, precision: int | None = None) -> dict:
        rnd = (lambda v: v) if precision is None else (lambda v: float(format(float(v), f".{precision}g")))
        opt = lambda v: None if v is None or math.isinf(v) else rnd(v)
        return {
            "method": self.method,
            "s": opt(self.s),
            "r_short": opt(self.r_short),
            "r_long": opt(self.r_long),
            "levels": [
                {"n": n, "B": rnd(B), "nodes": int(k)}
                for n, (B, k) in enumerate(zip(self.levels, self.node_counts))
            ],
        }

    def to_json(self, precision: int | None = 10, **extra) -> str:
        payload = self.to_dict(precision)
        payload.update(extra)
        return json.dumps(payload, sort_keys=True, indent=2)


class _Grid:
    def __init__(self, problem: RadialProblem, step: float | None):
        L = problem.bc.log_span
        if step is None:
            step = default_step(problem)
        n = max(8, int(math.ceil(L / step)) + 1)
        self.n = n
        self.h = L / (n - 1)
        self.c = self.h * self.h / 12.0
        self.x = self.h * np.arange(n)
        self.e2x = np.exp(2.0 * self.x)
        self.q = np.ascontiguousarray(problem.q_values(self.x), dtype=float)
        # beta above which g > 0 on the whole grid (no classically allowed region)
        self.beta_top = float(np.max(-self.q / self.e2x))

    def g(self, beta: float) -> np.ndarray:
        return beta * self.e2x + self.q

    def end_index(self, g: np.ndarray) -> int | None:
        allowed = np.flatnonzero(g[1:-1] <= 0.0)
        if allowed.size == 0:
            return None
        t = int(allowed[-1]) + 1
        tail = np.sqrt(np.maximum(g[t + 1:], 0.0)) * self.h
        beyond = np.flatnonzero(np.cumsum(tail) > _DECAY_EFOLDS)
        e = self.n - 1 if beyond.size == 0 else t + 1 + int(beyond[0])
        return max(e, min(t + 2, self.n - 1))

    def turning_index(self, g: np.ndarray) -> int | None:
        allowed = np.flatnonzero(g[1:-1] <= 0.0)
        return None if allowed.size == 0 else int(allowed[-1]) + 1

    def count(self, beta: float) -> int:
        g = self.g(beta)
        e = self.end_index(g)
        if e is None:
            return 0
        nodes = _kernels.count_nodes(g, self.c, e)
        if nodes < 0:
            raise SolverError("Numerov step too coarse for the forbidden region; reduce the step")
        return int(nodes)

    def determinant(self, beta: float, m: int, e: int) -> float:
        g = self.g(beta)
        o_m, o_m1 = _kernels.shoot(g, self.c, 0, m + 1)
        i_m1, i_m = _kernels.shoot(g, self.c, e, m)
        norm = math.hypot(o_m, o_m1) * math.hypot(i_m, i_m1)
        return (o_m * i_m1 - o_m1 * i_m) / norm

    def wavefunction(self, beta: float) -> np.ndarray:
        g = self.g(beta)
        e = self.end_index(g)
        w = np.zeros(self.n)
        if e is None:
            return w
        t = self.turning_index(g)
        m = int(min(max(t, 1), e - 2))
        out = np.zeros(self.n)
        inn = np.zeros(self.n)
        _kernels.solution(g, self.c, 0, m + 1, out)
        _kernels.solution(g, self.c, e, m, inn)
        k = m if abs(out[m]) >= abs(out[m + 1]) else m + 1
        if inn[k] == 0.0:
            k = m + 1 if k == m else m
        scale = out[k] / inn[k]
        w[: m + 1] = out[: m + 1]
        w[m + 1 : e + 1] = inn[m + 1 : e + 1] * scale
        return w / np.max(np.abs(w))


def default_step(problem: RadialProblem) -> float:
    """Log-grid step: 2000 points per decade, and at least 16 per half period pi/s."""
    q_min = float(np.min(problem.q_values(np.linspace(0.0, problem.bc.log_span, 257))))
    s_eff = math.sqrt(max(-q_min, 1e-12))
    return min(math.log(10.0) / 2000.0, math.pi / (16.0 * s_eff))


def numerov_count_nodes(problem: RadialProblem, B: float, step: float | None = None) -> int:
    """Interior nodes of the outward solution at binding B (= levels deeper than B)."""
    if not B > 0.0:
        raise DomainError("B must be positive")
    grid = _Grid(problem, step)
    return grid.count(B * problem.bc.r_short**2)


def level_count(problem: RadialProblem, step: float | None = None) -> int:
    """Total number of bound levels: the node count at the continuum edge."""
    if problem.strength is not None and problem.strength <= 0.25:
        return 0
    grid = _Grid(problem, step)
    return grid.count(problem.beta_floor)


def _node_count_of(w: np.ndarray) -> int:
    core = w[1:-1]
    tol = 1e-10 * np.max(np.abs(core)) if core.size else 0.0
    signs = np.sign(np.where(np.abs(core) > tol, core, 0.0))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def bound_states(problem: RadialProblem, max_levels: int, step: float | None = None,
                 rtol: float = 1e-13) -> EnergyLadder:
    """The ``max_levels`` deepest levels of ``problem`` (fewer if the spectrum ends)."""
    bc = problem.bc
    r2 = bc.r_short**2
    meta = dict(s=problem.s, r_short=bc.r_short, r_long=bc.r_long)
    if max_levels <= 0 or (problem.strength is not None and problem.strength <= 0.25):
        return EnergyLadder(np.empty(0), (), "numerov", **meta)
    grid = _Grid(problem, step)
    floor = problem.beta_floor
    hi = grid.beta_top * (1.0 + 1e-12)
    if hi <= floor:
        return EnergyLadder(np.empty(0), (), "numerov", **meta)
    total = grid.count(floor) if floor > 0.0 else grid.count(0.0)
    want = min(max_levels, total)
    if want == 0:
        return EnergyLadder(np.empty(0), (), "numerov", **meta)

    def mid(a, b):
        return floor + math.sqrt((a - floor) * (b - floor))

    lo = floor + (hi - floor) * 1e-2
    c_lo = grid.count(lo)
    for _ in range(200):
        if c_lo >= want:
            break
        lo = floor + (lo - floor) * 1e-3
        c_lo = grid.count(lo)
    else:  # pragma: no cover
        raise SolverError("could not bracket the requested levels")

    brackets: dict[int, tuple[float, float]] = {}
    stack = [(lo, hi, c_lo, 0)]
    while stack:
        a, b, ca, cb = stack.pop()
        if cb >= want or ca == cb:
            continue
        if ca - cb == 1:
            brackets[cb] = (a, b)
            continue
        if (b - floor) / (a - floor) - 1.0 < 1e-14:
            raise SolverError(f"levels {cb}..{ca - 1} are numerically degenerate near beta={a}")
        m = mid(a, b)
        cm = grid.count(m)
        stack.append((a, m, ca, cm))
        stack.append((m, b, cm, cb))

    betas = []
    for n in range(want):
        a, b = brackets[n]
        betas.append(_refine(grid, a, b, n, rtol))
    betas = np.array(betas)
    nodes = tuple(_node_count_of(grid.wavefunction(beta)) for beta in betas)
    return EnergyLadder(betas / r2, nodes, "numerov", **meta, info={"points": grid.n, "step": grid.h})


def _refine(grid: _Grid, a: float, b: float, n: int, rtol: float) -> float:
    g_b = grid.g(b)
    g_a = grid.g(a)
    t = grid.turning_index(g_b)
    if t is None:
        t = grid.turning_index(grid.g(math.sqrt(a * b) if a > 0 else 0.5 * b))
    e = grid.end_index(g_a)
    m = int(min(max(t if t is not None else 1, 1), e - 2))
    d_a = grid.determinant(a, m, e)
    d_b = grid.determinant(b, m, e)
    if d_a != 0.0 and d_b != 0.0 and (d_a < 0.0) != (d_b < 0.0):
        return brentq(lambda beta: grid.determinant(beta, m, e), a, b, xtol=1e-300, rtol=rtol, maxiter=200)
    # fall back to node-count bisection
    for _ in range(200):
        c = 0.5 * (a + b)
        if grid.count(c) >= n + 1:
            a = c
        else:
            b = c
        if b - a <= rtol * b:
            break
    return 0.5 * (a + b)


def eigenfunction(problem: RadialProblem, B: float, step: float | None = None):
    """Radii and normalised-to-max-one u(R) for binding ``B``."""
    grid = _Grid(problem, step)
    w = grid.wavefunction(B * problem.bc.r_short**2)
    R = problem.bc.r_short * np.exp(grid.x)
    u = w * np.exp(0.5 * grid.x)
    return R, u / np.max(np.abs(u))


def unitary_box_spectrum(s, bc: BoundaryConditions, max_levels: int, step: float | None = None) -> EnergyLadder:
    """Levels of the pure 1/R^2 problem with hard walls at both cutoffs."""
    return bound_states(RadialProblem.unitary(s, bc), max_levels, step=step)


def bessel_spectrum(s, r_short: float, max_levels: int) -> EnergyLadder:
    """Levels with a wall at ``r_short`` and a decaying tail: B_n = (x_n / r_short)^2.

    x_n are the zeros of K_{is}, largest first.
    """
    s_val = s.s if isinstance(s, ScalingFactor) else float(s)
    if not r_short > 0.0:
        raise DomainError("r_short must be positive")
    if max_levels <= 0:
        return EnergyLadder(np.empty(0), (), "bessel_analytic", s_val, r_short, math.inf)
    x_lo = s_val * math.exp(-(max_levels + 4) * math.pi / s_val) * 1e-2
    zeros = besselk_zeros(s_val, max(x_lo, 1e-300), s_val, max_count=max_levels)
    x = np.sort(zeros)[::-1][:max_levels]
    return EnergyLadder((x / r_short) ** 2, tuple(range(len(x))), "bessel_analytic", s_val, r_short, math.inf)


def _fd_tridiagonal(problem: RadialProblem, grid_size: int):
    L = problem.bc.log_span
    h = L / (grid_size + 1)
    x = h * np.arange(1, grid_size + 1)
    inv = np.exp(-x)
    q = problem.q_values(x)
    diag = (2.0 / h**2 + q) * inv * inv
    off = (-1.0 / h**2) * inv[:-1] * inv[1:]
    return diag, off


def fd_oracle(problem: RadialProblem, grid_size: int = 2000) -> EnergyLadder:
    """Second-order finite differences on the log grid, dense tridiagonal solve.

    Solves (-d^2/dx^2 + q) w = -beta e^{2x} w symmetrised by e^{-x}. Levels
    below the eigensolver's absolute resolution (~1e3 eps ||T||) are dropped.
    """
    if grid_size < 200:
        raise DomainError("grid_size must be at least 200")
    diag, off = _fd_tridiagonal(problem, grid_size)
    norm = float(np.max(np.abs(diag)) + 2.0 * np.max(np.abs(off)))
    resolution = 1e3 * np.finfo(float).eps * norm
    floor = max(problem.beta_floor, resolution)
    lam = eigh_tridiagonal(diag, off, eigvals_only=True, select="v", select_range=(-np.inf, -floor))
    betas = np.sort(-lam)[::-1]
    r2 = problem.bc.r_short**2
    bc = problem.bc
    return EnergyLadder(betas / r2, tuple(range(len(betas))), "fd_oracle", problem.s, bc.r_short, bc.r_long,
                        info={"grid_size": grid_size, "beta_resolution": resolution})


def fd_extrapolated(problem: RadialProblem, grid_size: int = 2000) -> EnergyLadder:
    """Richardson extrapolation of :func:`fd_oracle` from steps h and h/2."""
    coarse = fd_oracle(problem, grid_size)
    fine = fd_oracle(problem, 2 * grid_size + 1)
    n = min(len(coarse), len(fine))
    levels = (4.0 * fine.levels[:n] - coarse.levels[:n]) / 3.0
    return EnergyLadder(levels, tuple(range(n)), "fd_oracle", problem.s, problem.bc.r_short, problem.bc.r_long,
                        info={"grid_size": grid_size, "extrapolated": True,
                              "beta_resolution": coarse.info["beta_resolution"]})


def geometric_window(ladder: EnergyLadder, x_max: float = 0.01, outer_min: float = 100.0) -> np.ndarray:
    """Indices of levels far from both walls: sqrt(B) r_short < x_max, sqrt(B) r_long > outer_min."""
    k = np.sqrt(ladder.levels)
    ok = k * ladder.r_short < x_max
    if ladder.r_long is not None and math.isfinite(ladder.r_long):
        ok &= k * ladder.r_long > outer_min
    return np.flatnonzero(ok)
