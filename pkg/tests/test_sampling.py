import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from circslice.algebra import phase_rotate
from circslice.sampling import (
    Estimate,
    NonFiniteValueError,
    QuadratureSpec,
    circle_nodes,
    estimate_mean,
    map_chunks,
    sample_phase_group,
    sample_sphere,
)


def first_coordinate_moment(m, k):
    """E[w_1^k] on S^{m-1} from the marginal density ~ (1 - t^2)^((m-3)/2)."""
    dens = lambda t: (1 - t * t) ** ((m - 3) / 2)
    num = integrate.quad(lambda t: t**k * dens(t), -1, 1)[0]
    den = integrate.quad(dens, -1, 1)[0]
    return num / den


def test_oracle_moments():
    assert first_coordinate_moment(4, 4) == pytest.approx(1 / 8, rel=1e-10)
    assert first_coordinate_moment(6, 2) == pytest.approx(1 / 6, rel=1e-10)


@pytest.mark.parametrize("m,k", [(2, 2), (4, 4), (8, 2), (8, 4)])
def test_sphere_moments(m, k):
    w = sample_sphere(m, 200_000, 11)
    est = estimate_mean(w[:, 0] ** k)
    target = 0.5 if (m, k) == (2, 2) else first_coordinate_moment(m, k)
    assert abs(est.value - target) <= 3 * est.std_error


def test_sphere_unit_and_deterministic():
    a = sample_sphere(6, 1000, 5)
    b = sample_sphere(6, 1000, 5)
    assert a.tobytes() == b.tobytes()
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-14)
    assert sample_sphere(6, 1000, 6).tobytes() != a.tobytes()


def test_substreams_are_independent():
    a = sample_sphere(4, 100, 5, label="sphere")
    b = sample_sphere(4, 100, 5, label="oracle")
    assert not np.allclose(a, b)
    # asking for more samples extends the stream without changing the prefix
    np.testing.assert_array_equal(sample_sphere(4, 200, 5)[:100], a)


def test_sphere_dimension_check():
    with pytest.raises(ValueError):
        sample_sphere(1, 10, 0)


def test_phase_group():
    q = sample_phase_group(4, 200_000, 3)
    np.testing.assert_allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-14)
    est = estimate_mean(q[:, 0] ** 2)
    assert abs(est.value - 0.25) <= 3 * est.std_error
    z = sample_phase_group(2, 200_000, 3)
    angles = np.arctan2(z[:, 1], z[:, 0])
    est = estimate_mean(np.cos(angles) ** 2)
    assert abs(est.value - 0.5) <= 3 * est.std_error
    assert sample_phase_group(4, 10, 3).tobytes() == sample_phase_group(4, 10, 3).tobytes()
    with pytest.raises(ValueError):
        sample_phase_group(3, 10, 0)


def test_circle_nodes_k4():
    q, wts = circle_nodes(4)
    np.testing.assert_allclose(q, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    np.testing.assert_array_equal(wts, 0.25)
    assert math.fsum(wts) == 1.0


@pytest.mark.parametrize("K", [4, 6, 16, 64])
def test_circle_rule_exactness(K):
    q, wts = circle_nodes(K)
    theta = np.arctan2(q[:, 1], q[:, 0])
    assert abs(wts @ np.cos(theta) ** 2 - 0.5) <= 1e-15
    for j in range(1, K):
        assert abs(wts @ np.cos(j * theta)) <= 1e-12
        assert abs(wts @ np.sin(j * theta)) <= 1e-12
    # degree K is not integrated exactly
    assert abs(wts @ np.cos(K * theta) - 1.0) <= 1e-12


@pytest.mark.parametrize("K", [2, 3, 7])
def test_circle_nodes_rejects(K):
    with pytest.raises(ValueError):
        circle_nodes(K)


def test_estimate_mean_basic():
    est = estimate_mean(np.full(1000, 2.5))
    assert est == Estimate(2.5, 0.0, 1000)
    est = estimate_mean(np.tile([0.0, 1.0], 500))
    assert est.value == 0.5
    assert est.std_error == pytest.approx(0.5 * math.sqrt(1000 / 999) / math.sqrt(1000))
    with pytest.raises(ValueError):
        estimate_mean([])
    with pytest.raises(NonFiniteValueError) as info:
        estimate_mean([1.0, 2.0, np.nan, 3.0])
    assert info.value.index == 2


@settings(max_examples=100)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=300), st.integers(1, 64))
def test_estimate_mean_matches_numpy(xs, chunk):
    est = estimate_mean(xs, chunk)
    x = np.asarray(xs)
    assert est.value == pytest.approx(np.mean(x), rel=1e-9, abs=1e-6)
    assert est.std_error == pytest.approx(np.std(x, ddof=1) / math.sqrt(len(x)), rel=1e-6, abs=1e-6)


def test_reduction_ignores_evaluation_order():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(10_000) * 1e3
    perm = rng.permutation(len(x))
    # evaluate in a scrambled order, store by index
    y = np.empty_like(x)
    y[perm] = x[perm]
    a, b = estimate_mean(x, 128), estimate_mean(y, 128)
    assert (a.value, a.std_error) == (b.value, b.std_error)


def test_map_chunks_thread_count_invariant():
    w = sample_sphere(4, 5000, 1)
    f = lambda c: np.sum(np.sin(c) ** 3, axis=1)
    a = map_chunks(f, w, 97, 1)
    b = map_chunks(f, w, 97, 4)
    assert a.tobytes() == b.tobytes()


def test_phase_invariance_of_sphere_measure():
    w = sample_sphere(4, 100_000, 9)
    f = lambda x: np.cos(3 * x[:, 0]) + x[:, 1] ** 2 * x[:, 2]
    for q in ([0.0, 1.0], [math.cos(1.1), math.sin(1.1)]):
        moved = phase_rotate(w, np.array(q))
        a, b = estimate_mean(f(w)), estimate_mean(f(moved))
        assert abs(a.value - b.value) <= 3 * math.hypot(a.std_error, b.std_error)
        for k in (2, 4):
            ma, mb = estimate_mean(moved[:, 0] ** k), estimate_mean(w[:, 0] ** k)
            assert abs(ma.value - mb.value) <= 3 * math.hypot(ma.std_error, mb.std_error)


def test_quadrature_spec_checks():
    QuadratureSpec()
    for bad in ({"sphere_samples": 0}, {"circle_nodes": 5}, {"circle_nodes": 2}, {"phase_samples": 0},
                {"chunk_size": 0}, {"seed": -1}, {"seed": 2**64}):
        with pytest.raises(ValueError):
            QuadratureSpec(**bad)
