import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interwoven.constants import TABULATED_RATIOS, REFERENCE_S0, hybrid_s, reference_s0, tetramer_level_count
from interwoven.eigensolver import EnergyLadder, bessel_spectrum
from interwoven.errors import ConstraintViolation, DomainError, InsufficientLevels, MissingReference
from interwoven.spectrum import (
    InterwovenSpectrum,
    SpectrumConfig,
    attached_ladder,
    fixed_points,
    intermediate_state_count,
    interwoven_spectrum,
    ratio_table,
    scaling_curve,
    trimer_ladder,
    validate_spectrum,
)

FIG2_CUTOFFS = list(range(100, 1001, 100))


@pytest.fixture(scope="module")
def fig2_curve():
    return scaling_curve(0.001, 4, 1.0, FIG2_CUTOFFS)


def test_trimer_ladder():
    lad = trimer_ladder(2.0, reference_s0(0.01), 5)
    np.testing.assert_allclose(lad.ratios(), 4.6979, atol=5e-4)
    assert len(trimer_ladder(2.0, 3.0, 0)) == 1
    with pytest.raises(DomainError):
        trimer_ladder(0.0, 3.0, 2)


def test_trimer_ladder_matches_bessel_zeros():
    s0 = reference_s0(0.01)
    bes = bessel_spectrum(s0, 1.0, 14)
    deep = bes.levels[np.sqrt(bes.levels) < 0.01]
    closed = trimer_ladder(deep[0], s0, len(deep) - 1)
    np.testing.assert_allclose(bes.ratios()[-3:], closed.ratios()[-3:], rtol=1e-3)
    np.testing.assert_allclose(closed.levels, deep, rtol=1e-3)


def test_attached_ladder_ratio_and_cut():
    s4 = hybrid_s(reference_s0(0.01), 4)
    lad = attached_ladder(1.0, s4, 1e4)
    np.testing.assert_allclose(lad.ratios(), 2.9739, atol=5e-4)
    assert np.all(lad.levels > 1.0)
    assert lad.levels[-1] / s4.ratio <= 1.0
    assert len(attached_ladder(1.0, s4, 1.0)) == 0
    assert len(attached_ladder(1.0, s4, 0.5)) == 0


def test_attached_ladder_uncut_when_parent_collapsed():
    lad = attached_ladder(0.0, 5.0, 1.0, n_max=30)
    assert len(lad) == 31


@settings(max_examples=50)
@given(st.floats(min_value=1e-6, max_value=0.5), st.floats(min_value=2.0, max_value=20.0))
def test_truncation_count_matches_formula(sqrtB3_r2, s4):
    # ladder head at 1/r2^2 with r2 = 1, parent B3 = sqrtB3_r2^2
    lad = attached_ladder(sqrtB3_r2**2, s4, 1.0)
    assert abs(len(lad) - tetramer_level_count(sqrtB3_r2**2, 1.0, s4)) <= 1


def test_intermediate_state_count():
    assert intermediate_state_count(4.0612, 5.7650) == 1
    assert intermediate_state_count(3.0, 3.0) == 1
    assert intermediate_state_count(12.698, 17.965) == 1
    assert intermediate_state_count(2.0, 6.1) == 3
    with pytest.raises(DomainError):
        intermediate_state_count(5.0, 4.0)


@pytest.mark.parametrize("A", [0.04, 0.03, 0.02, 0.01, 0.001])
def test_at_most_one_tetramer_between_trimers(A):
    s0 = reference_s0(A)
    assert intermediate_state_count(s0, hybrid_s(s0, 4)) == 1


def test_interwoven_spectrum_defaults():
    assembled = interwoven_spectrum(0.01, 1.0)
    tri = assembled.trimer.levels
    for i, lad in assembled.tetramer_ladders.items():
        assert np.all(lad.levels > tri[i])
        if i > 0:
            between = np.count_nonzero((lad.levels > tri[i]) & (lad.levels < tri[i - 1]))
            assert between <= 1
    heads = [lad.levels[0] for lad in assembled.tetramer_ladders.values()]
    assert np.all(np.diff(heads) < 0)


def test_ground_ladder_unrestricted_below_ground_trimer():
    cfg = SpectrumConfig(heads={0: 1e6})
    assembled = interwoven_spectrum(0.01, 1.0, cfg)
    lad = assembled.tetramer_ladders[0]
    assert len(lad) == tetramer_level_count(1.0, 1e-3, lad.s) + 1


def test_higher_n_ladders_and_json():
    assembled = interwoven_spectrum(0.001, 1.0, SpectrumConfig(higher_n=6))
    assert set(assembled.higher) == {5, 6}
    data = json.loads(assembled.to_json())
    assert set(data) == {"A", "trimer", "tetramer_ladders", "higher"}
    assert data["tetramer_ladders"]["0"]["threshold"] == pytest.approx(1.0)
    assert assembled.to_json() == interwoven_spectrum(0.001, 1.0, SpectrumConfig(higher_n=6)).to_json()


def test_constraint_violation_names_inequality():
    assembled = interwoven_spectrum(0.01, 1.0)
    bad = dict(assembled.tetramer_ladders)
    bad[1] = attached_ladder(0.0, bad[1].s, assembled.trimer.levels[1] * 0.5, cutoff_rule="none", n_max=2)
    with pytest.raises(ConstraintViolation, match=r"B4,1\^\(n\) > B3\^\(1\)"):
        validate_spectrum(InterwovenSpectrum(assembled.A, assembled.trimer, bad, {}, assembled.thresholds))


def test_fig2_curve_converges(fig2_curve):
    assert [p[0] for p in fig2_curve.points] == [float(r) for r in FIG2_CUTOFFS]
    assert fig2_curve.fixed_point == pytest.approx(1.4187, abs=5e-4)
    d = fig2_curve.distances()
    assert np.all(np.diff(d) <= 1e-8)
    assert d[-1] == d.min() + 0.0 or d[-1] - d.min() <= 1e-8
    # once the tracked triple clears the outer wall, Y approaches X from below
    assert all(1 < Y < X for _, X, Y in fig2_curve.points[1:])
    _, X, Y = fig2_curve.points[-1]
    assert abs(X / fig2_curve.fixed_point - 1) < 1e-3 and abs(Y / fig2_curve.fixed_point - 1) < 1e-3


def test_fig2_curve_deepest_triple_stalls():
    curve = scaling_curve(0.001, 4, 1.0, [100, 1000], triple="deepest")
    (_, X1, Y1), (_, X2, Y2) = curve.points
    assert X1 == pytest.approx(X2, rel=1e-9) and Y1 == pytest.approx(Y2, rel=1e-9)
    assert X2 == pytest.approx(1.6005, abs=5e-4)


def test_curve_skips_short_boxes():
    with pytest.warns(UserWarning, match="skipped"):
        curve = scaling_curve(0.001, 4, 1.0, [1.2, 100.0])
    assert [p[0] for p in curve.points] == [100.0]
    with pytest.raises(InsufficientLevels), pytest.warns(UserWarning):
        scaling_curve(0.001, 4, 1.0, [1.1])


def test_fixed_points_n3_to_8():
    fps = dict(fixed_points(0.001))
    assert list(fps) == [3, 4, 5, 6, 7, 8]
    assert fps[3] == pytest.approx(1.64, abs=5e-3)
    assert all(fps[n + 1] < fps[n] for n in range(3, 8))


def test_curve_csv(fig2_curve):
    text = fig2_curve.to_csv(precision=8, reference_rows=fixed_points(0.001))
    lines = text.splitlines()
    assert lines[0] == "N,Rc,X,Y,fixed_point"
    assert lines[1].startswith("3,inf,")
    assert [ln.split(",")[1] for ln in lines[7:]] == [str(r) for r in FIG2_CUTOFFS]


@pytest.mark.parametrize("A,N,value", [(0.04, 4, 7.95), (0.001, 6, 1.28), (0.03, 5, 4.42)])
def test_ratio_table_examples(A, N, value):
    rows = {r.label: r for r in ratio_table([A], 6)}
    assert rows[f"e^(2pi/s{N})"].computed == pytest.approx(value, abs=0.01)


def test_ratio_table_monotone():
    As = sorted(TABULATED_RATIOS)
    table = {(r.A, r.label): r.computed for r in ratio_table(As, 8)}
    for A in As:
        vals = [table[(A, f"e^(2pi/s{N})")] for N in range(3, 9)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
    for N in range(3, 9):
        vals = [table[(A, f"e^(2pi/s{N})")] for A in As]
        assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(r.deviation == 0 for r in ratio_table(As, 4) if r.label == "s0")
    with pytest.raises(MissingReference):
        ratio_table([0.07], 4)
