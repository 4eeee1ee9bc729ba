import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupepi.binary import LN2, binary_entropy, star
from groupepi.errors import CapacityError, DomainError, GroupMismatchError, UnsupportedGroupError
from groupepi.groups import (
    FiniteAbelianGroup,
    GroupDistribution,
    canonical_chain,
    convolve,
    convolve_arrays,
    distribution_from_json,
    distribution_with_entropy,
    entropy,
    extremal_pair,
    gaussian_2n,
    gaussian_parameter,
    is_gaussian,
    two_level_distribution,
)

from conftest import brute_convolve, f2n_ref, shannon

GROUPS = ["z2", "z3", "z4", "z5", "z8", "z2xz2", "z2xz4", "z2xz2xz2", "z3xz4"]


@pytest.mark.parametrize("text", GROUPS)
def test_parse_and_codec(text):
    g = FiniteAbelianGroup.parse(text)
    assert str(g) == text
    for i in range(g.order):
        assert g.encode(g.decode(i)) == i
        assert g.add(i, g.neg(i)) == 0


def test_parse_errors():
    for bad in ("", "x4", "z", "z0", "z4x"):
        with pytest.raises(DomainError):
            FiniteAbelianGroup.parse(bad)
    with pytest.raises(CapacityError):
        FiniteAbelianGroup.cyclic(8192)


def test_two_group_flags():
    assert FiniteAbelianGroup.parse("z2xz4").is_two_group
    assert FiniteAbelianGroup.parse("z2xz4").exponent_n == 3
    assert not FiniteAbelianGroup.parse("z6").is_two_group


@pytest.mark.parametrize("text", GROUPS)
def test_convolution_matches_enumeration(text, rng):
    g = FiniteAbelianGroup.parse(text)
    a = rng.dirichlet(np.ones(g.order))
    b = rng.dirichlet(np.ones(g.order))
    np.testing.assert_allclose(convolve_arrays(g, a, b), brute_convolve(g.cyclic_orders, a, b), atol=1e-15)


def test_fft_path_matches_shift_sum(rng):
    g = FiniteAbelianGroup.cyclic(2048)
    a = rng.dirichlet(np.ones(g.order))
    b = rng.dirichlet(np.ones(g.order))
    ref = sum(a[h] * np.roll(b, h) for h in range(g.order))
    np.testing.assert_allclose(convolve_arrays(g, a, b), ref, atol=1e-14)


def test_distribution_validation():
    g = FiniteAbelianGroup.cyclic(4)
    with pytest.raises(DomainError):
        GroupDistribution(g, [0.5, 0.5, 0.1, -0.1])
    with pytest.raises(DomainError):
        GroupDistribution(g, [0.5, 0.5, 0.1, 0.0])
    with pytest.raises(DomainError):
        GroupDistribution(g, [1.0, 0.0])
    d = GroupDistribution(g, [0.5, 0.5 + 5e-13, -1e-16, 0.0])
    assert d.probs.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.all(d.probs >= 0)
    with pytest.raises(ValueError):
        d.probs[0] = 0.3


def test_entropy_matches_scipy(rng):
    g = FiniteAbelianGroup.parse("z2xz4")
    p = rng.dirichlet(np.ones(8))
    assert entropy(GroupDistribution(g, p)) == pytest.approx(shannon(p), abs=1e-14)
    assert GroupDistribution.uniform(g).entropy() == pytest.approx(np.log(8))
    assert GroupDistribution.point_mass(g, 3).entropy() == 0.0


def test_convolve_group_mismatch():
    a = GroupDistribution.uniform(FiniteAbelianGroup.cyclic(4))
    b = GroupDistribution.uniform(FiniteAbelianGroup.parse("z2xz2"))
    with pytest.raises(GroupMismatchError):
        convolve(a, b)


def test_json_roundtrip_and_decimals():
    g = FiniteAbelianGroup.parse("z2xz2")
    d = distribution_from_json({"group": {"cyclic_orders": [2, 2]}, "probs": ["0.1", "0.2", "0.3", "0.4"]})
    assert d.group == g
    assert d.probs[3] == pytest.approx(0.4)
    again = distribution_from_json(json.dumps(d.to_json()))
    assert again.allclose(d, atol=0.0)
    with pytest.raises(DomainError):
        distribution_from_json({"probs": [1.0]})


def test_chain_examples():
    z8 = canonical_chain(FiniteAbelianGroup.cyclic(8))
    assert [lv.tolist() for lv in z8.levels] == [[0], [0, 4], [0, 2, 4, 6], list(range(8))]
    g = FiniteAbelianGroup.parse("z2xz4")
    ch = canonical_chain(g)
    decoded = [sorted(g.decode(i) for i in lv) for lv in ch.levels]
    assert decoded[1] == [(0, 0), (0, 2)]
    assert decoded[2] == [(0, 0), (0, 1), (0, 2), (0, 3)]
    with pytest.raises(UnsupportedGroupError):
        canonical_chain(FiniteAbelianGroup.cyclic(6))


@pytest.mark.parametrize("text", ["z2", "z4", "z8", "z2xz2", "z2xz4", "z2xz2xz2", "z4xz4"])
def test_chain_levels_are_nested_subgroups(text):
    g = FiniteAbelianGroup.parse(text)
    ch = canonical_chain(g)
    assert len(ch.levels) == g.exponent_n + 1
    for k, lv in enumerate(ch.levels):
        s = set(lv.tolist())
        assert len(s) == 2**k
        assert all(g.add(a, b) in s for a in s for b in s)
        if k:
            assert set(ch.levels[k - 1].tolist()) <= s


@settings(max_examples=50)
@given(st.sampled_from(["z4", "z8", "z2xz4", "z2xz2xz2"]), st.data())
def test_two_level_entropy(text, data):
    g = FiniteAbelianGroup.parse(text)
    k = data.draw(st.integers(0, g.exponent_n - 1))
    alpha = data.draw(st.floats(0.0, 1.0))
    d = two_level_distribution(g, k, alpha)
    assert d.entropy() == pytest.approx(k * LN2 + binary_entropy(alpha), abs=1e-12)


def test_gaussian_on_z8():
    g = FiniteAbelianGroup.cyclic(8)
    d = gaussian_2n(g, 0.7)
    np.testing.assert_allclose(d.probs, [0.7 / 4, 0.3 / 4] * 4)
    assert is_gaussian(d)
    assert gaussian_parameter(d) == pytest.approx(0.7)
    assert gaussian_2n(g, 0.5).allclose(GroupDistribution.uniform(g))
    assert not is_gaussian(GroupDistribution(g, np.arange(1, 9) / 36))


@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from([2, 4, 8, 16]))
def test_gaussian_closed_under_convolution(a, b, m):
    # subgroup mass of the sum is a*b + (1-a)(1-b) = 1 - a star b
    g = FiniteAbelianGroup.cyclic(m)
    c = convolve(gaussian_2n(g, a), gaussian_2n(g, b))
    assert is_gaussian(c, atol=1e-12)
    assert gaussian_parameter(c) == pytest.approx(1 - star(a, b), abs=1e-12)


@settings(max_examples=100)
@given(st.sampled_from(["z2", "z4", "z8", "z2xz2", "z2xz4", "z16"]), st.data())
def test_extremal_pair_hits_targets_and_minimum(text, data):
    g = FiniteAbelianGroup.parse(text)
    top = g.log_order
    x = data.draw(st.floats(0, top))
    y = data.draw(st.floats(0, top))
    px, py = extremal_pair(g, x, y)
    assert px.entropy() == pytest.approx(x, abs=1e-12)
    assert py.entropy() == pytest.approx(y, abs=1e-12)
    assert convolve(px, py).entropy() == pytest.approx(f2n_ref(g.exponent_n, x, y), abs=1e-10)


def test_distribution_with_entropy_seams():
    g = FiniteAbelianGroup.cyclic(8)
    for k in range(4):
        assert distribution_with_entropy(g, k * LN2).entropy() == pytest.approx(k * LN2, abs=1e-14)
