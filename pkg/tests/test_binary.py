import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupepi.binary import (
    LN2,
    binary_entropy,
    df2_dx,
    df2_dy,
    f2,
    fold,
    inverse_binary_entropy,
    solve_star,
    star,
)
from groupepi.errors import BoundaryError, DomainError

from conftest import f2_ref, h_inv_ref, h_ref

unit = st.floats(0.0, 1.0)
half = st.floats(0.0, 0.5)
nats = st.floats(0.0, float(LN2))


def test_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(LN2, abs=1e-15)
    assert binary_entropy(1e-16) == 0.0


@given(unit)
def test_entropy_matches_scipy(p):
    assert binary_entropy(p) == pytest.approx(h_ref(p), abs=1e-14)


def test_entropy_vectorized():
    p = np.linspace(0, 1, 11)
    out = binary_entropy(p)
    assert out.shape == (11,)
    np.testing.assert_allclose(out, [h_ref(v) for v in p], atol=1e-14)


@pytest.mark.parametrize("bad", [-0.1, 1.1, np.nan])
def test_entropy_domain(bad):
    with pytest.raises(DomainError):
        binary_entropy(bad)


@given(nats)
def test_inverse_roundtrip(x):
    p = inverse_binary_entropy(x)
    assert 0.0 <= p <= 0.5
    assert binary_entropy(p) == pytest.approx(x, abs=1e-12)


@given(st.floats(0.0, float(LN2) - 1e-6))
def test_inverse_matches_brentq(x):
    # near ln 2 the inverse is ill-conditioned (h'(1/2) = 0); the roundtrip
    # test above covers that end in entropy space
    assert inverse_binary_entropy(x) == pytest.approx(h_inv_ref(x), abs=1e-10)


def test_inverse_endpoints_and_errors():
    assert inverse_binary_entropy(0.0) == 0.0
    assert inverse_binary_entropy(LN2) == 0.5
    with pytest.raises(DomainError):
        inverse_binary_entropy(0.7)
    with pytest.raises(DomainError):
        inverse_binary_entropy(-1e-3)


def test_star_and_fold():
    assert star(0.1, 0.2) == pytest.approx(0.1 * 0.8 + 0.2 * 0.9)
    assert star(0.0, 0.3) == pytest.approx(0.3)
    assert star(0.5, 0.3) == pytest.approx(0.5)
    assert fold(0.8) == pytest.approx(0.2)


@given(half, half)
def test_star_commutes_and_solve_inverts(a, t):
    assert star(a, t) == pytest.approx(star(t, a), abs=1e-15)
    c = star(a, t)
    if a < 0.5 - 1e-6:
        assert solve_star(a, c) == pytest.approx(t, abs=1e-9)


def test_solve_star_infeasible():
    with pytest.raises(DomainError):
        solve_star(0.3, 0.1)


def test_f2_value():
    # oracle: brentq inversion instead of bisection
    assert f2(0.3, 0.4) == pytest.approx(f2_ref(0.3, 0.4), abs=1e-12)
    assert f2(0.3, 0.4) == pytest.approx(0.502857946424, abs=1e-11)


@given(nats, nats)
def test_f2_properties(x, y):
    v = f2(x, y)
    assert v == pytest.approx(f2(y, x), abs=1e-13)
    assert v >= max(x, y) - 1e-12
    assert v <= LN2 + 1e-15
    assert v == pytest.approx(f2_ref(x, y), abs=1e-10)


def test_f2_edges():
    assert f2(0.0, 0.4) == pytest.approx(0.4, abs=1e-13)
    assert f2(LN2, 0.2) == pytest.approx(LN2, abs=1e-13)


@settings(max_examples=60)
@given(st.floats(0.02, 0.67), st.floats(0.0, 0.69))
def test_df2_dx_matches_finite_difference(x, y):
    step = 1e-6
    num = (f2(x + step, y) - f2(x - step, y)) / (2 * step)
    assert df2_dx(x, y) == pytest.approx(num, abs=1e-5)


def test_df2_dx_limits():
    assert df2_dx(0.3, 0.0) == 1.0
    q = inverse_binary_entropy(0.2)
    assert df2_dx(LN2, 0.2) == pytest.approx((1 - 2 * q) ** 2, abs=1e-14)
    assert df2_dx(0.0, 0.2) == 0.0
    # the limit value at ln 2 is continuous with the interior formula
    assert df2_dx(LN2 - 1e-6, 0.2) == pytest.approx((1 - 2 * q) ** 2, abs=1e-3)
    with pytest.raises(BoundaryError):
        df2_dx(0.0, 0.2, boundary="raise")
    with pytest.raises(BoundaryError):
        df2_dx(LN2, 0.2, boundary="raise")


@given(st.floats(0.01, 0.68), st.floats(0.01, 0.68))
def test_df2_dx_bounded_by_one(x, y):
    d = df2_dx(x, y)
    assert 0.0 <= d < 1.0


def test_df2_dy_symmetry():
    assert df2_dy(0.2, 0.5) == pytest.approx(df2_dx(0.5, 0.2))
