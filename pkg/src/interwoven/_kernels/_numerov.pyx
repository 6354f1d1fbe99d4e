# cython: language_level=3
"""Compiled Numerov kernels; mirrors ``_numerov_py`` exactly."""

from libc.math cimport fabs

cdef double _BIG = 1e150


def count_nodes(const double[::1] g, double c, Py_ssize_t stop):
    cdef double w0 = 0.0, w1 = 1.0, w2
    cdef double f0 = 1.0 - c * g[0]
    cdef double f1 = 1.0 - c * g[1]
    cdef double f2
    cdef Py_ssize_t k
    cdef long nodes = 0
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
        if fabs(w2) > _BIG:
            w1 /= _BIG
            w2 /= _BIG
        w0 = w1
        w1 = w2
        f0 = f1
        f1 = f2
    return nodes


def shoot(const double[::1] g, double c, Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t d = 1 if stop > start else -1
    cdef double w0 = 0.0, w1 = 1.0, w2, m
    cdef double f0 = 1.0 - c * g[start]
    cdef double f1 = 1.0 - c * g[start + d]
    cdef double f2
    cdef Py_ssize_t k = start + d
    while k != stop:
        f2 = 1.0 - c * g[k + d]
        w2 = ((12.0 - 10.0 * f1) * w1 - f0 * w0) / f2
        if fabs(w2) > _BIG:
            w1 /= _BIG
            w2 /= _BIG
        w0 = w1
        w1 = w2
        f0 = f1
        f1 = f2
        k += d
    m = fabs(w0) if fabs(w0) > fabs(w1) else fabs(w1)
    return w0 / m, w1 / m


def solution(const double[::1] g, double c, Py_ssize_t start, Py_ssize_t stop, double[::1] out):
    cdef Py_ssize_t d = 1 if stop > start else -1
    cdef double f0 = 1.0 - c * g[start]
    cdef double f1 = 1.0 - c * g[start + d]
    cdef double f2, w2
    cdef Py_ssize_t k = start + d
    cdef Py_ssize_t j
    out[start] = 0.0
    out[start + d] = 1.0
    while k != stop:
        f2 = 1.0 - c * g[k + d]
        w2 = ((12.0 - 10.0 * f1) * out[k] - f0 * out[k - d]) / f2
        out[k + d] = w2
        if fabs(w2) > _BIG:
            j = start
            while j != k + 2 * d:
                out[j] /= _BIG
                j += d
        f0 = f1
        f1 = f2
        k += d
