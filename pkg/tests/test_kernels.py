import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interwoven import _kernels

py = _kernels.python_backend
compiled = _kernels.compiled_backend
needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def profile(beta, s, n, span):
    h = span / (n - 1)
    x = h * np.arange(n)
    return np.ascontiguousarray(beta * np.exp(2 * x) - s * s), h * h / 12.0


def test_backend_selection():
    assert _kernels.BACKEND_NAME in ("cython", "python")
    if compiled is not None:
        assert _kernels.count_nodes is compiled.count_nodes


def test_free_oscillator_nodes():
    # w'' = -k^2 w on [0, L] has floor(k L / pi) interior nodes
    k, L, n = 7.3, 10.0, 20001
    h = L / (n - 1)
    g = np.full(n, -k * k)
    assert py.count_nodes(g, h * h / 12.0, n - 1) == int(k * L / np.pi)


def test_forbidden_everywhere():
    g, c = profile(10.0, 2.0, 2000, 3.0)
    assert np.all(g > 0)
    assert py.count_nodes(g, c, len(g) - 1) == 0


def test_step_too_coarse_flagged():
    g = np.full(100, 1e6)
    assert py.count_nodes(g, 1.0, 99) == -1


def test_shoot_normalised_and_consistent_with_solution():
    g, c = profile(1e-3, 6.0, 5001, 8.0)
    a, b = py.shoot(g, c, 0, 4000)
    assert max(abs(a), abs(b)) == pytest.approx(1.0)
    w = np.zeros(len(g))
    py.solution(g, c, 0, 4000, w)
    assert w[3999] / w[4000] == pytest.approx(a / b, rel=1e-12)
    inward = py.shoot(g, c, 5000, 3000)
    w2 = np.zeros(len(g))
    py.solution(g, c, 5000, 3000, w2)
    assert w2[3001] / w2[3000] == pytest.approx(inward[0] / inward[1], rel=1e-12)


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1e-8, max_value=1e2), st.floats(min_value=0.5, max_value=18.0),
       st.integers(min_value=50, max_value=6000))
def test_backends_agree(beta, s, n):
    g, c = profile(beta, s, n, 6.0)
    stop = n - 1
    assert compiled.count_nodes(g, c, stop) == py.count_nodes(g, c, stop)
    np.testing.assert_allclose(compiled.shoot(g, c, 0, stop), py.shoot(g, c, 0, stop), rtol=1e-12, atol=1e-300)
    np.testing.assert_allclose(compiled.shoot(g, c, stop, n // 3), py.shoot(g, c, stop, n // 3), rtol=1e-12,
                               atol=1e-300)
    a, b = np.zeros(n), np.zeros(n)
    compiled.solution(g, c, 0, stop, a)
    py.solution(g, c, 0, stop, b)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-300)


def test_pure_python_fallback_end_to_end():
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json; from interwoven import _kernels; "
        "from interwoven.eigensolver import BoundaryConditions, unitary_box_spectrum; "
        "lad = unitary_box_spectrum(4.0, BoundaryConditions(1.0, 100.0), 3); "
        "print(json.dumps([_kernels.BACKEND_NAME, list(lad.levels)]))"
    )
    env = dict(os.environ, INTERWOVEN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, levels = json.loads(out.stdout)
    assert name == "python"
    from interwoven.eigensolver import BoundaryConditions, unitary_box_spectrum

    here = unitary_box_spectrum(4.0, BoundaryConditions(1.0, 100.0), 3).levels
    np.testing.assert_allclose(levels, here, rtol=1e-12)
