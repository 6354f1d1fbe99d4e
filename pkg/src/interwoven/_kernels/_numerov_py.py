"""Pure-Python Numerov kernels; same contract as the compiled ``_numerov``.

All routines integrate ``w'' = g w`` on a uniform grid given the samples
``g`` and ``c = h^2 / 12``. The wall value is zero and the next value one;
magnitudes are renormalised to stay finite.
"""

_BIG = 1e150


def count_nodes(g, c, stop):
    """Sign changes of the outward solution on indices 1..stop.

    Returns -1 if the Numerov coefficient ``1 - c g`` turns non-positive
    before the count is settled (step too coarse for the local decay).
    """
    w0 = 0.0
    w1 = 1.0
    f0 = 1.0 - c * g[0]
    f1 = 1.0 - c * g[1]
    nodes = 0
    for k in range(1, stop):
        f2 = 1.0 - c * g[k + 1]
        if f2 <= 0.0:
            return -1
        w2 = ((12.0 - 10.0 * f1) * w1 - f0 * w0) / f2
        if w2 == 0.0:
            if k + 1 < stop:
                nodes += 1
        elif (w1 < 0.0) != (w2 < 0.0) and w1 != 0.0:
            nodes += 1
        if abs(w2) > _BIG:
            w1 /= _BIG
            w2 /= _BIG
        w0, w1 = w1, w2
        f0, f1 = f1, f2
    return nodes


def shoot(g, c, start, stop):
    """Integrate from ``start`` (w = 0) to ``stop``; return (w[stop - d], w[stop]).

    ``d`` is the direction (+1 outward, -1 inward); the pair is scaled so its
    larger magnitude is 1.
    """
    d = 1 if stop > start else -1
    w0 = 0.0
    w1 = 1.0
    f0 = 1.0 - c * g[start]
    f1 = 1.0 - c * g[start + d]
    k = start + d
    while k != stop:
        f2 = 1.0 - c * g[k + d]
        w2 = ((12.0 - 10.0 * f1) * w1 - f0 * w0) / f2
        if abs(w2) > _BIG:
            w1 /= _BIG
            w2 /= _BIG
        w0, w1 = w1, w2
        f0, f1 = f1, f2
        k += d
    m = max(abs(w0), abs(w1))
    return w0 / m, w1 / m


def solution(g, c, start, stop, out):
    """Fill ``out[start..stop]`` (inclusive, either direction) with the solution."""
    d = 1 if stop > start else -1
    out[start] = 0.0
    out[start + d] = 1.0
    f0 = 1.0 - c * g[start]
    f1 = 1.0 - c * g[start + d]
    k = start + d
    while k != stop:
        f2 = 1.0 - c * g[k + d]
        w2 = ((12.0 - 10.0 * f1) * out[k] - f0 * out[k - d]) / f2
        out[k + d] = w2
        if abs(w2) > _BIG:
            j = start
            while j != k + 2 * d:
                out[j] /= _BIG
                j += d
        f0, f1 = f1, f2
        k += d
