import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontocell import kinetic
from ontocell.numerics import is_hermitian


def gram(spec, n_y=64):
    x, y = kinetic.kernel_grids(spec, n_y)
    return kinetic.beable_kernel(spec, x, y)


def test_linear_kernel_is_delta():
    spec = kinetic.linear(129)
    k = gram(spec, 128)
    assert kinetic.gram_deviation(k) < 1e-8


def test_linear_kernel_matches_direct_sum():
    spec = kinetic.linear(17)
    x, y = kinetic.kernel_grids(spec, 16)
    k = kinetic.beable_kernel(spec, x, y)
    w = kinetic.trapezoid_weights(17, spec.dp)
    i, j = 3, 5
    direct = np.sum(w * np.exp(1j * (x[i] * spec.p_grid - y[j] * spec.T_values))) / (2 * math.pi)
    assert k[i, j] == pytest.approx(direct * math.sqrt((x[1] - x[0]) * (y[1] - y[0])), abs=1e-14)


def test_quadratic_gram_refines():
    devs = [kinetic.gram_deviation(gram(kinetic.quadratic_positive(m))) for m in (257, 513, 1025)]
    assert devs[0] > devs[1] > devs[2]


def test_quadratic_rows_equal_norm():
    k = gram(kinetic.quadratic_positive(257))
    diag = np.real(np.diag(k.conj().T @ k))
    assert np.ptp(diag) < 1e-3
    assert np.mean(diag) == pytest.approx(1, abs=0.05)


def test_sign_changing_velocity_rejected():
    p = np.linspace(-1, 1, 33)
    with pytest.raises(ValueError, match="sign"):
        kinetic.KineticSpec(p, p**2 / 2, p)
    with pytest.raises(ValueError):
        kinetic.from_samples(p, p**2 / 2)


def test_negative_velocity_records_sign():
    spec = kinetic.linear(33, c=-2.0)
    assert spec.sign == -1 and spec.monotone
    assert kinetic.gram_deviation(gram(spec, 32)) < 1e-8


def test_non_monotone_warns():
    p = np.linspace(0.1, 3, 40)
    t = np.sin(4 * p)
    spec = kinetic.KineticSpec(p, t, np.ones_like(p))
    assert not spec.monotone
    x, y = np.linspace(-1, 1, 5), np.linspace(-1, 1, 5)
    with pytest.warns(kinetic.UnitarityWarning):
        k = kinetic.beable_kernel(spec, x, y)
    assert np.all(np.isfinite(k))


def test_grid_checks():
    p = np.array([0.0, 1.0, 3.0])
    with pytest.raises(ValueError, match="uniform"):
        kinetic.KineticSpec(p, p, np.ones(3))
    with pytest.raises(ValueError):
        kinetic.KineticSpec(np.arange(3.0), np.arange(4.0), np.ones(3))


def test_central_differences():
    p = np.linspace(0.5, 4, 50)
    spec = kinetic.from_samples(p, p**2 / 2)
    # second order differences are exact on a quadratic
    assert np.allclose(spec.v_values, p, atol=1e-12)


def test_beable_is_position_for_linear():
    spec = kinetic.linear(64)
    x, _ = kinetic.conjugate_grid(spec)
    y = kinetic.beable_operator(spec)
    assert np.array_equal(y, np.diag(x).astype(complex))
    assert np.allclose(kinetic.inverse_position(spec, y), np.diag(x))


@pytest.mark.parametrize("c", [0.5, 2.0, -3.0])
def test_scaled_linear(c):
    spec = kinetic.linear(64, c=c)
    x, _ = kinetic.conjugate_grid(spec)
    y = kinetic.beable_operator(spec)
    assert np.allclose(kinetic.inverse_position(spec, y), np.diag(x), atol=1e-13)
    base = kinetic.drift_check(kinetic.linear(64))
    assert kinetic.drift_check(spec) == pytest.approx(base, rel=1e-6, abs=1e-12)


def test_beable_hermitian_quadratic():
    spec = kinetic.quadratic_positive(128)
    assert is_hermitian(kinetic.beable_operator(spec), 1e-10)


def test_inverse_position_round_trip_quadratic():
    spec = kinetic.quadratic_positive(64)
    x, _ = kinetic.conjugate_grid(spec)
    back = kinetic.inverse_position(spec, kinetic.beable_operator(spec))
    # {{x/v} v} differs from x by double commutators; it is Hermitian at least
    assert is_hermitian(back, 1e-10)
    assert np.allclose(np.real(np.trace(back)), np.sum(x), rtol=1e-6)


def test_closed_form_position_matrix():
    spec = kinetic.quadratic_positive(32)
    x, _ = kinetic.conjugate_grid(spec)
    w = kinetic.fourier_pair(spec)
    dense = w.conj().T @ np.diag(x) @ w
    assert np.allclose(kinetic.position_in_momentum_basis(spec), dense, atol=1e-12)
    with pytest.raises(ValueError):
        kinetic.position_in_momentum_basis(kinetic.quadratic_positive(33))


def test_longdouble_closed_form_agrees():
    spec = kinetic.quadratic_positive(32)
    a = kinetic.position_in_momentum_basis(spec)
    b = kinetic.position_in_momentum_basis(spec, np.longdouble)
    assert np.allclose(a, b.astype(complex), atol=1e-13)


def test_linear_drift_small():
    assert kinetic.drift_check(kinetic.linear(128)) < 1e-8


def test_quadratic_drift_small_at_256():
    assert kinetic.drift_check(kinetic.quadratic_positive(256)) < 1e-2


def test_quadratic_drift_decreases_until_roundoff():
    d = [kinetic.drift_check(kinetic.quadratic_positive(m)) for m in (64, 128, 256)]
    assert d[0] > d[1] > d[2]


def test_entrywise_deviation_is_order_one():
    # the literal entrywise measure does not converge with a spectral p
    spec = kinetic.quadratic_positive(64)
    assert kinetic.interior_row_deviation(spec) > 0.1


def test_participation_and_support():
    spec = kinetic.quadratic_positive(129)
    pr = kinetic.participation_ratio(gram(spec))
    assert pr.shape == (128,) and np.all(pr >= 1)
    sup = kinetic.effective_support(spec)
    assert sup["T_min"] == pytest.approx(0.125) and sup["T_max"] == pytest.approx(32)
    assert sup["monotone"] and sup["sign"] == 1


@settings(max_examples=20)
@given(st.floats(0.2, 2.0), st.floats(2.5, 6.0), st.sampled_from([64, 96, 128]))
def test_beable_hermitian_property(p_min, p_max, m):
    spec = kinetic.quadratic_positive(m, p_min, p_max)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        y = kinetic.beable_operator(spec)
    assert is_hermitian(y, 1e-10)


def test_extended_precision_lowers_floor():
    spec = kinetic.quadratic_positive(256, dtype=np.longdouble)
    assert spec.p_grid.dtype == np.longdouble
    fine = kinetic.drift_check(spec, np.longdouble)
    assert fine < 1e-14 < kinetic.drift_check(kinetic.quadratic_positive(256))
