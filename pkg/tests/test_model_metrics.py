import math

import numpy as np
import pytest

from hitchin_glue.errors import MissingTodaSolution, OriginSingularity, StencilOutOfDomain, ZeroRadius
from hitchin_glue.model_metrics import (
    MetricDiag,
    hitchin_residual_model,
    limiting_metric,
    model_metric,
    model_unitary_pair,
)
from hitchin_glue.partition import ClusterPartition
from hitchin_glue.toda import evaluate_rescaled


def single(K, **kw):
    return ClusterPartition.from_sizes([K], **kw)


def test_limiting_metric_example():
    np.testing.assert_allclose(limiting_metric(single(2), 0.25), [0.5, 2.0], rtol=1e-15)


@pytest.mark.parametrize("sizes", [[2], [3, 2, 1], [4, 1, 1]])
def test_limiting_metric_unit_radius(sizes):
    np.testing.assert_array_equal(limiting_metric(ClusterPartition.from_sizes(sizes), 1.0), 1.0)


def test_limiting_metric_zero_radius():
    with pytest.raises(ZeroRadius):
        limiting_metric(single(2), 0.0)


@pytest.mark.parametrize("sizes", [[2], [3, 2, 1], [5, 4]])
@pytest.mark.parametrize("radius", [0.01, 0.37, 1.9])
def test_block_determinants(toda, sizes, radius):
    p = ClusterPartition.from_sizes(sizes)
    for h in (limiting_metric(p, radius), model_metric(p, toda, 3.0, radius)):
        for off, b in zip(p.offsets(), p.blocks):
            assert abs(np.sum(np.log(h[off:off + b.K]))) <= 1e-12


def test_model_metric_matches_toda_value(toda):
    u = float(evaluate_rescaled(toda[2], 1.0, 1.0)[0])
    np.testing.assert_allclose(model_metric(single(2), toda, 1.0, 1.0), [math.exp(u), math.exp(-u)])


@pytest.mark.parametrize("radius", [0.5, 0.75, 1.0])
def test_model_metric_converges_to_limit(toda, radius):
    p = ClusterPartition.from_sizes([3, 2])
    lim = limiting_metric(p, radius)
    dist = [np.max(np.abs(model_metric(p, toda, t, radius) - lim)) for t in (1, 2, 4, 8)]
    assert all(b < a for a, b in zip(dist, dist[1:]))


def test_missing_solution(toda):
    with pytest.raises(MissingTodaSolution):
        model_metric(single(6), toda, 1.0, 0.5)


def test_metric_diag_alpha_sums():
    d = MetricDiag.build(ClusterPartition.from_sizes([3, 2, 1]), 2.0)
    assert all(v == 0 for v in d.block_alpha_sums().values())
    assert [e.toda_index for e in d.entries][-1] is None


def test_rank_one_block(toda):
    p = ClusterPartition.from_sizes([2, 1], shifts=[0.5, -1.0])
    s = model_unitary_pair(p, toda, 2.0, 0.3 + 0.2j)
    assert s.A_z[2, 2] == 0 and s.Phi[2, 2] == -1.0
    assert np.all(s.Phi[2, :2] == 0) and np.all(s.Phi[:2, 2] == 0)


@pytest.mark.parametrize("K", [2, 3, 4, 5])
def test_phi_structure(toda, K):
    z = 0.4 * np.exp(0.7j)
    s = model_unitary_pair(single(K), toda, 1.5, z)
    mask = np.zeros((K, K), bool)
    mask[np.arange(K - 1), np.arange(1, K)] = True
    mask[K - 1, 0] = True
    assert np.all(s.Phi[~mask & ~np.eye(K, dtype=bool)] == 0)
    # all cyclic moduli have the form |z|^(1/K) e^((v_i - v_{i+1})/2)
    u = evaluate_rescaled(toda[K], 1.5, abs(z))
    expected = abs(z) ** (1 / K) * np.exp(0.5 * (u - np.roll(u, -1)))
    got = np.abs(np.append(np.diag(s.Phi, 1), s.Phi[K - 1, 0]))
    np.testing.assert_allclose(got, expected, rtol=1e-13)


@pytest.mark.parametrize("K", [2, 3, 4])
@pytest.mark.parametrize("t", [1.0, 3.0])
def test_characteristic_polynomial(toda, K, t):
    z = 0.8 * np.exp(1.1j)
    s = model_unitary_pair(single(K), toda, t, z)
    expected = np.zeros(K + 1, complex)
    expected[0], expected[-1] = 1, -z
    np.testing.assert_allclose(np.poly(s.Phi), expected, atol=1e-12)
    # eigenvalues of t Phi satisfy lambda^K = t^K z
    lam = np.linalg.eigvals(s.higgs)
    np.testing.assert_allclose(lam**K, t**K * z, atol=1e-11)


def test_trace_and_antihermitian_connection(toda):
    p = ClusterPartition.from_sizes([3, 2, 1])
    s = model_unitary_pair(p, toda, 2.0, -0.3 + 0.5j)
    assert abs(np.trace(s.Phi)) < 1e-12
    # A = A_z dz + A_zbar dzbar is anti-hermitian iff A_zbar = -A_z^dagger
    np.testing.assert_allclose(s.A_zbar, -s.A_z.conj().T, atol=1e-15)


def test_origin_singularity(toda):
    with pytest.raises(OriginSingularity):
        model_unitary_pair(single(2), toda, 1.0, 0.0)


@pytest.mark.parametrize("K", [2, 3])
@pytest.mark.parametrize("t", [1.0, 4.0])
def test_hitchin_residual_vanishes(toda, rng, K, t):
    z = rng.uniform(0.1, 2.0, 20) * np.exp(1j * rng.uniform(0, 2 * np.pi, 20))
    R = hitchin_residual_model(single(K), toda, t, z)
    assert np.max(np.abs(R)) <= 1e-6
    np.testing.assert_allclose(R, -np.conj(np.swapaxes(R, -1, -2)), atol=1e-12)
    off = ~np.eye(K, dtype=bool)
    assert np.all(np.abs(R[:, off]) <= 1e-12)
    assert np.max(np.abs(np.trace(R, axis1=-2, axis2=-1))) <= 1e-9


def test_hitchin_residual_multiblock_with_coordinates(toda):
    p = ClusterPartition.from_sizes([3, 2, 1], f_prime0=[1.3 + 0.2j, 0.7, 1.0])
    R = hitchin_residual_model(p, toda, 2.0, np.array([0.4 + 0.3j, -1.1j]))
    assert np.max(np.abs(R)) <= 1e-6


def test_hitchin_residual_flat_block(toda):
    p = ClusterPartition.from_sizes([1, 1], shifts=[1.0, -1.0])
    assert np.all(hitchin_residual_model(p, toda, 3.0, 0.5) == 0)


def test_stencil_out_of_domain(toda):
    with pytest.raises(StencilOutOfDomain):
        hitchin_residual_model(single(2), toda, 1.0, 1e-4)
    with pytest.raises(StencilOutOfDomain):
        hitchin_residual_model(single(2), toda, 1.0, 2e-4, h=1e-4)
