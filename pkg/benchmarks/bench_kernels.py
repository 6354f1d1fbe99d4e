"""Time the compiled and pure-Python Numerov kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Also checks that both backends return identical node counts and shooting
values, and times a full ``bound_states`` solve with each backend.
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from interwoven import _kernels
from interwoven import eigensolver
from interwoven.eigensolver import BoundaryConditions, RadialProblem


def make_g(s: float = 17.965, span: float = math.log(1e4), beta: float = 1e-3):
    h = min(math.log(10.0) / 2000.0, math.pi / (16.0 * s))
    n = int(math.ceil(span / h)) + 1
    h = span / (n - 1)
    x = h * np.arange(n)
    g = np.ascontiguousarray(beta * np.exp(2.0 * x) - s * s)
    return g, h * h / 12.0


def solve_with(backend, problem, levels):
    saved = (_kernels.count_nodes, _kernels.shoot, _kernels.solution)
    _kernels.count_nodes, _kernels.shoot, _kernels.solution = backend.count_nodes, backend.shoot, backend.solution
    try:
        return eigensolver.bound_states(problem, levels)
    finally:
        _kernels.count_nodes, _kernels.shoot, _kernels.solution = saved


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    g, c = make_g()
    stop = len(g) - 1
    backends = {"python": _kernels.python_backend}
    if _kernels.compiled_backend is not None:
        backends["cython"] = _kernels.compiled_backend
    else:
        print("compiled extension not built; timing the Python fallback only")

    print(f"grid points: {len(g)}")
    results = {}
    for name, be in backends.items():
        nodes = be.count_nodes(g, c, stop)
        tail = be.shoot(g, c, 0, stop)
        t_count = min(timeit.repeat(lambda: be.count_nodes(g, c, stop), number=1, repeat=args.repeat))
        t_shoot = min(timeit.repeat(lambda: be.shoot(g, c, 0, stop), number=1, repeat=args.repeat))
        results[name] = (nodes, tail)
        print(f"{name:>7}: count_nodes {t_count * 1e3:9.3f} ms   shoot {t_shoot * 1e3:9.3f} ms   nodes={nodes}")
    if len(results) == 2:
        (n1, t1), (n2, t2) = results.values()
        assert n1 == n2, "backends disagree on the node count"
        assert np.allclose(t1, t2, rtol=1e-12, atol=0.0), "backends disagree on shooting values"
        print("backends agree")

    problem = RadialProblem.unitary(17.965, BoundaryConditions(1.0, 1000.0))
    for name, be in backends.items():
        t = min(timeit.repeat(lambda: solve_with(be, problem, 39), number=1, repeat=max(1, args.repeat // 2)))
        print(f"{name:>7}: bound_states(39 levels) {t:8.3f} s")


if __name__ == "__main__":
    main()
