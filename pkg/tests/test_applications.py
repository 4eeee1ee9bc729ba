import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupepi.applications import (
    BroadcastSpec,
    ConditionalSource,
    broadcast_region,
    broadcast_region_gaussian,
    conditional_entropy,
    default_alpha_grid,
    degraded_noise,
    equality_condition_check,
    helper_region,
    mgl_monte_carlo,
    random_conditional_source,
    random_distribution,
    scalar_mgl_check,
    vector_mgl_check,
)
from groupepi.binary import LN2, binary_entropy, star
from groupepi.errors import (
    CapacityError,
    DomainError,
    GroupMismatchError,
    PreconditionError,
    UnsupportedGroupError,
)
from groupepi.groups import FiniteAbelianGroup, GroupDistribution, convolve, gaussian_2n

from conftest import shannon

Z2 = FiniteAbelianGroup.cyclic(2)
Z4 = FiniteAbelianGroup.cyclic(4)


def test_conditional_entropy_matches_joint(rng):
    for g in ("z4", "z2xz4", "z3"):
        group = FiniteAbelianGroup.parse(g)
        src = random_conditional_source(group, rng)
        joint = src.joint()
        expected = shannon(joint.reshape(-1)) - shannon(joint.sum(axis=1))
        assert conditional_entropy(src) == pytest.approx(expected, abs=1e-12)


def test_conditional_source_validation():
    row = GroupDistribution.uniform(Z4)
    with pytest.raises(DomainError):
        ConditionalSource(np.array([0.5, 0.5]), (row,))
    with pytest.raises(DomainError):
        ConditionalSource(np.array([0.7, 0.7]), (row, row))
    with pytest.raises(GroupMismatchError):
        ConditionalSource(np.array([0.5, 0.5]), (row, GroupDistribution.uniform(Z2)))


def test_mgl_degenerate_cases():
    # constant U and a point-mass noise: H(Y|U) = H(X) = f(H(X), 0)
    x = GroupDistribution(Z4, [0.5, 0.2, 0.2, 0.1])
    src = ConditionalSource(np.array([1.0]), (x,))
    assert scalar_mgl_check(src, GroupDistribution.point_mass(Z4, 2)) == pytest.approx(0.0, abs=1e-12)
    # extremal pair makes the inequality tight
    from groupepi.groups import extremal_pair

    px, pz = extremal_pair(Z4, 0.9, 0.4)
    tight = ConditionalSource(np.array([1.0]), (px,))
    assert scalar_mgl_check(tight, pz) == pytest.approx(0.0, abs=1e-10)


def test_mgl_unsupported_group_without_numeric():
    g = FiniteAbelianGroup.cyclic(3)
    src = ConditionalSource(np.array([1.0]), (GroupDistribution(g, [0.6, 0.3, 0.1]),))
    noise = GroupDistribution(g, [0.8, 0.1, 0.1])
    with pytest.raises(UnsupportedGroupError):
        scalar_mgl_check(src, noise)
    assert scalar_mgl_check(src, noise, numeric=True) >= -1e-9


@settings(max_examples=80)
@given(st.sampled_from(["z2", "z4", "z8", "z2xz2", "z2xz4"]), st.integers(0, 2**31))
def test_scalar_mgl_nonnegative(g, seed):
    rng = np.random.default_rng(seed)
    group = FiniteAbelianGroup.parse(g)
    assert scalar_mgl_check(random_conditional_source(group, rng), random_distribution(group, rng)) >= -1e-9


def test_vector_k1_reduces_to_scalar(rng):
    src = random_conditional_source(Z4, rng)
    noise = random_distribution(Z4, rng)
    assert vector_mgl_check(Z4, src.joint(), noise) == pytest.approx(scalar_mgl_check(src, noise), abs=1e-12)


def test_vector_iid_letters_match_scalar(rng):
    # letters i.i.d. given a constant U: per-letter entropies equal the scalar ones
    row = random_distribution(Z4, rng)
    noise = random_distribution(Z4, rng)
    table = np.multiply.outer(row.probs, row.probs)[None]
    src = ConditionalSource(np.array([1.0]), (row,))
    assert vector_mgl_check(Z4, table, noise) == pytest.approx(scalar_mgl_check(src, noise), abs=1e-12)


def test_vector_validation():
    noise = GroupDistribution.uniform(Z4)
    with pytest.raises(DomainError):
        vector_mgl_check(Z4, np.ones((1, 4, 3)) / 12, noise)
    with pytest.raises(CapacityError):
        vector_mgl_check(Z4, np.ones((1, 4, 4, 4, 4)) / 256, noise)
    with pytest.raises(UnsupportedGroupError):
        g = FiniteAbelianGroup.cyclic(3)
        vector_mgl_check(g, np.ones((1, 3)) / 3, GroupDistribution.uniform(g))
    with pytest.raises(GroupMismatchError):
        vector_mgl_check(Z4, np.ones((1, 4)) / 4, GroupDistribution.uniform(Z2))


def test_monte_carlo_report_and_workers():
    a = mgl_monte_carlo("scalar", 60, seed=5)
    b = mgl_monte_carlo("scalar", 60, seed=5, workers=2)
    assert a == b
    assert a["passed"] and a["min_slack"] >= -1e-9
    v = mgl_monte_carlo("vector", 20, seed=5)
    assert v["passed"]
    with pytest.raises(DomainError):
        mgl_monte_carlo("matrix", 3)


def test_equality_check():
    assert equality_condition_check(gaussian_2n(Z4, 0.8), gaussian_2n(Z4, 0.9)) == pytest.approx(0.0, abs=1e-12)
    assert equality_condition_check(GroupDistribution(Z4, [0.7, 0.1, 0.1, 0.1]),
                                    GroupDistribution(Z4, [0.7, 0.1, 0.1, 0.1])) > 1e-3


# --- rate regions -------------------------------------------------------------


@pytest.mark.parametrize("p1,p2", [(0.1, 0.2), (0.05, 0.3), (0.2, 0.2)])
def test_broadcast_n1_matches_binary(p1, p2):
    z1 = GroupDistribution(Z2, [1 - p1, p1])
    tilde_p = (p2 - p1) / (1 - 2 * p1)
    spec = BroadcastSpec(1, z1, GroupDistribution(Z2, [1 - tilde_p, tilde_p]))
    region = broadcast_region(spec, default_alpha_grid(51))
    for a, r1, r2 in region.points():
        assert r1 == pytest.approx(binary_entropy(star(a, p1)) - binary_entropy(p1), abs=1e-12)
        assert r2 == pytest.approx(LN2 - binary_entropy(star(a, p2)), abs=1e-12)


@pytest.mark.parametrize("p", [0.05, 0.11, 0.3])
def test_helper_n1_matches_binary(p):
    region = helper_region(1, GroupDistribution(Z2, [1 - p, p]), default_alpha_grid(51))
    for a, r1, r2 in region.points():
        assert r1 == pytest.approx(binary_entropy(star(a, p)), abs=1e-12)
        assert r2 == pytest.approx(LN2 - binary_entropy(a), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_broadcast_gaussian_equality_and_monotone(n):
    g = FiniteAbelianGroup.cyclic(2**n)
    region = broadcast_region_gaussian(n, gaussian_2n(g, 0.9), gaussian_2n(g, 0.75))
    assert np.max(np.abs(region.equality_residual)) <= 1e-9
    assert np.all(np.diff(region.r1) >= -1e-12)
    assert np.all(np.diff(region.r2) <= 1e-12)
    assert region.r1[-1] == pytest.approx(n * LN2 - gaussian_2n(g, 0.9).entropy(), abs=1e-12)
    assert region.r2[-1] == pytest.approx(0.0, abs=1e-12)


def test_broadcast_with_non_gaussian_first_noise():
    g = FiniteAbelianGroup.cyclic(8)
    z1 = GroupDistribution(g, [0.6, 0.1, 0.05, 0.05, 0.1, 0.04, 0.03, 0.03])
    region = broadcast_region(BroadcastSpec(3, z1, gaussian_2n(g, 0.85)), default_alpha_grid(21))
    assert np.max(np.abs(region.equality_residual)) <= 1e-9


def test_degraded_noise_solves_convolution():
    g = FiniteAbelianGroup.cyclic(4)
    z1, z2 = gaussian_2n(g, 0.9), gaussian_2n(g, 0.75)
    tilde = degraded_noise(z1, z2)
    assert convolve(z1, tilde).allclose(z2, atol=1e-12)
    with pytest.raises(PreconditionError):
        degraded_noise(z2, z1)
    with pytest.raises(PreconditionError):
        degraded_noise(GroupDistribution(g, [0.7, 0.1, 0.1, 0.1]), z2)


def test_helper_requires_gaussian_noise():
    with pytest.raises(PreconditionError):
        helper_region(2, GroupDistribution(Z4, [0.7, 0.1, 0.1, 0.1]))
    with pytest.raises(GroupMismatchError):
        helper_region(3, gaussian_2n(Z4, 0.8))


def test_region_serialization():
    region = helper_region(2, gaussian_2n(Z4, 0.8), [0.5, 0.0, 0.25])
    assert list(region.alpha) == [0.0, 0.25, 0.5]
    text = region.to_csv(scale=1 / LN2)
    lines = text.strip().split("\n")
    assert lines[0] == "alpha,R1,R2"
    assert len(lines) == 4
    # alpha = 0 is uniform on the odd coset, entropy 1 bit, so R2 = 2 - 1 bits
    assert float(lines[1].split(",")[2]) == pytest.approx(1.0, abs=1e-11)
    obj = region.to_json()
    assert obj["kind"] == "helper" and len(obj["R1"]) == 3
