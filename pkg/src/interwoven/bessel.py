"""Modified Bessel function of the second kind with imaginary order, K_{is}(x).

K_{is}(x) = 1/2 \\int_{-inf}^{inf} exp(-x cosh t + i s t) dt. On the real
axis the integrand cancels down to a result of size ~exp(-pi s / 2), so the
path is shifted to Im t = v, which pulls that factor out analytically:

    K_{is}(x) = 1/2 exp(-s v) Re \\int exp(-x cosh(u + i v) + i s u) du.

The shifted integrand decays double-exponentially in u, so the trapezoidal
rule (the double-exponential rule for this kind of integrand) converges
geometrically; the step is halved until two estimates agree.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
# drop the integrand once exp(-x cos v (cosh u - 1)) falls below this
_LOG_CUTOFF = 42.0


class PhaseWindowWarning(UserWarning):
    """The small-argument phase form is used outside its accuracy window."""


class UnderflowWarning(UserWarning):
    """K_{is}(x) is below the double-precision range and was returned as 0."""


def _shift(s: float, x: float) -> float:
    # saddle of -x cosh t + i s t sits at Im t = arcsin(min(1, s/x)); stop short of pi/2
    # by ~3/s so the remaining cancellation is at most ~e^3
    if s == 0.0:
        return 0.0
    v_max = 0.5 * math.pi - min(0.5 * math.pi, 3.0 / s)
    return min(v_max, math.asin(min(1.0, s / x)))


def _integrate(s: float, x: float, weight_cosh: bool, rtol: float):
    v = _shift(s, x)
    cv, sv = math.cos(v), math.sin(v)
    umax = math.acosh(1.0 + _LOG_CUTOFF / (x * cv)) + 0.5
    h = min(0.25, 0.5 / max(1.0, s)) * 2.0
    prev = None
    while True:
        u = np.arange(-umax, umax + 0.5 * h, h)
        t = u + 1j * v
        vals = np.exp(-x * (np.cosh(u) * cv - 1.0) + 1j * (s * u - x * np.sinh(u) * sv))
        if weight_cosh:
            vals = vals * np.cosh(t)
        total = h * vals.real.sum()
        scale = h * np.abs(vals).sum()
        if prev is not None and abs(total - prev) <= rtol * scale:
            break
        if h < 1e-6:  # pragma: no cover - not reached for x > 0
            break
        prev = total
        h *= 0.5
    # restore exp(-x) taken out of the integrand and the shift factor exp(-s v)
    log_factor = -x - s * v
    return 0.5 * total, 0.5 * scale, log_factor


def besselk_imag(s: float, x: float, rtol: float = 1e-14) -> float:
    """K_{is}(x) for real order s >= 0 and x > 0.

    Returns 0.0 and warns :class:`UnderflowWarning` when the value
    underflows double precision in the monotone tail x >> s.
    """
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    s = abs(float(s))
    total, _, log_factor = _integrate(s, float(x), False, rtol)
    if total == 0.0:
        return 0.0
    value = total * math.exp(log_factor)
    if value == 0.0:
        warnings.warn(f"K_is({x}) underflows for s={s}; returning 0", UnderflowWarning, stacklevel=2)
    return value


def besselk_imag_scaled(s: float, x: float, rtol: float = 1e-14) -> float:
    """``exp(pi s/2) K_{is}(x)``; O(1) in the oscillatory region x < s."""
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    s = abs(float(s))
    total, _, log_factor = _integrate(s, float(x), False, rtol)
    return total * math.exp(log_factor + 0.5 * math.pi * s)


def besselk_imag_deriv(s: float, x: float, rtol: float = 1e-14) -> float:
    """d/dx K_{is}(x) = -\\int_0^inf cosh t exp(-x cosh t) cos(s t) dt."""
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    s = abs(float(s))
    total, _, log_factor = _integrate(s, float(x), True, rtol)
    return -total * math.exp(log_factor)


def arg_gamma_1pis(s: float, terms: int = 100_000) -> float:
    """arg Gamma(1 + i s) (continuous branch, zero at s = 0).

    Uses arg Gamma(1+is) = -gamma_E s + sum_k [s/k - arctan(s/k)]; the tail
    beyond ``terms`` is replaced by its midpoint-rule integral, which is
    available in closed form.
    """
    s = float(s)
    if s == 0.0:
        return 0.0
    k = np.arange(1, terms + 1, dtype=float)
    z = s / k
    small = np.abs(z) < 1e-2
    zs = z[small]
    terms_arr = np.empty_like(z)
    terms_arr[small] = zs**3 / 3.0 - zs**5 / 5.0 + zs**7 / 7.0 - zs**9 / 9.0
    terms_arr[~small] = z[~small] - np.arctan(z[~small])
    T = terms + 0.5
    zt = s / T
    # \int_T^inf (s/t - arctan(s/t)) dt = T arctan(s/T) + (s/2) ln(1 + (s/T)^2) - s
    if abs(zt) < 1e-2:
        tail = s * (zt**2 / 6.0 - zt**4 / 20.0 + zt**6 / 42.0)
    else:
        tail = T * math.atan(zt) + 0.5 * s * math.log1p(zt * zt) - s
    # sum smallest terms first
    return -EULER_GAMMA * s + float(np.sum(terms_arr[::-1])) + tail


def _log_amplitude(s: float) -> float:
    # log sqrt(pi / (s sinh(pi s))), stable for large s
    ps = math.pi * s
    log_sinh = ps + math.log1p(-math.exp(-2.0 * ps)) - math.log(2.0)
    return 0.5 * (math.log(math.pi / s) - log_sinh)


@dataclass(frozen=True)
class PhaseForm:
    """Leading small-x form ``-amplitude_ref * sin(s ln(x/2) - phase_offset)``.

    ``amplitude_ref = sqrt(pi / (s sinh(pi s)))`` and ``phase_offset`` is
    arg Gamma(1 + i s); zeros are spaced by the factor e^{pi/s} in x.
    """

    s: float
    amplitude_ref: float
    phase_offset: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = -self.amplitude_ref * np.sin(self.s * np.log(0.5 * x) - self.phase_offset)
        return float(out) if out.ndim == 0 else out

    def zeros(self, x_lo: float, x_hi: float) -> np.ndarray:
        """Exact zeros of the phase form in [x_lo, x_hi], ascending."""
        # s ln(x/2) - theta = k pi
        k_lo = math.ceil((self.s * math.log(0.5 * x_lo) - self.phase_offset) / math.pi)
        k_hi = math.floor((self.s * math.log(0.5 * x_hi) - self.phase_offset) / math.pi)
        k = np.arange(k_lo, k_hi + 1)
        return 2.0 * np.exp((k * math.pi + self.phase_offset) / self.s)


def phase_form(s: float) -> PhaseForm:
    if not s > 0.0:
        raise DomainError("phase form needs s > 0")
    return PhaseForm(float(s), math.exp(_log_amplitude(s)), arg_gamma_1pis(s))


def besselk_phase(s: float, x: float) -> float:
    """Small-argument form of K_{is}(x); warns outside x < 0.1 min(1, 1/s)."""
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    if x >= 0.1 * min(1.0, 1.0 / s):
        warnings.warn(f"phase form used at x={x} outside its window for s={s}", PhaseWindowWarning, stacklevel=2)
    return phase_form(s)(x)


def besselk_zeros(s: float, x_lo: float, x_hi: float, points_per_period: int = 64,
                  max_count: int | None = None) -> np.ndarray:
    """All zeros of K_{is}(x) in [x_lo, x_hi], ascending.

    Sign-change scan on a logarithmic grid with ``points_per_period`` points
    per period pi/s of ln x, refined by Brent's method. Zeros only exist for
    x < s, so the scan is clipped there. With ``max_count`` the scan runs
    downward from the top and stops after that many zeros.
    """
    if not 0.0 < x_lo < x_hi:
        raise DomainError("need 0 < x_lo < x_hi")
    if not s > 0.0:
        return np.empty(0)
    top = min(x_hi, float(s))
    if top <= x_lo:
        return np.empty(0)
    step = math.pi / s / points_per_period
    f = lambda x: besselk_imag_scaled(s, x)
    found = []
    t_hi = math.log(top)
    f_hi = f(top)
    t_stop = math.log(x_lo)
    while t_hi > t_stop:
        t_lo = max(t_stop, t_hi - step)
        f_lo = f(math.exp(t_lo))
        if f_lo == 0.0:
            found.append(math.exp(t_lo))
        elif f_hi != 0.0 and (f_lo < 0.0) != (f_hi < 0.0):
            found.append(brentq(f, math.exp(t_lo), math.exp(t_hi), xtol=1e-300, rtol=1e-14))
        if max_count is not None and len(found) >= max_count:
            break
        t_hi, f_hi = t_lo, f_lo
    return np.array(sorted(found))
