"""Polygon spaces: squaring map, Hopf map, samplers, and accessors."""
import math

import numpy as np
import pytest
from scipy import stats

from symmpoly import (InvalidDimensionError, InvalidSizeError, Polygon,
                      Quaternion, SeedStream, closure_residual, hopf_map,
                      ks_distance, perimeter, sample_arm, sample_pol, segment,
                      space_dim, square_map, vertices)
from symmpoly.polygons import space_edges_batch

SEED = 7


def test_square_map_units():
    assert np.allclose(square_map([1.0]), [[1.0, 0.0]])
    assert np.allclose(square_map([1.0j]), [[-1.0, 0.0]])
    z = (1.0 + 1.0j) / math.sqrt(2.0)
    assert np.allclose(square_map([z]), [[0.0, 1.0]])


def test_square_map_edge_length_is_modulus_squared():
    rng = SeedStream(SEED, 0).generator()
    z = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    edges = square_map(z)
    assert np.allclose(np.linalg.norm(edges, axis=1), np.abs(z) ** 2,
                       rtol=0, atol=1e-12)


def test_hopf_map_units():
    assert np.allclose(hopf_map(Quaternion(1, 0, 0, 0)), [[1.0, 0.0, 0.0]])
    assert np.allclose(hopf_map(Quaternion(0, 0, 1, 0)), [[-1.0, 0.0, 0.0]])
    # i also maps to (1, 0, 0): the fiber over each edge is a circle
    assert np.allclose(hopf_map(Quaternion(0, 1, 0, 0)), [[1.0, 0.0, 0.0]])


def test_hopf_map_edge_length_is_norm_squared():
    rng = SeedStream(SEED, 1).generator()
    comp = rng.standard_normal((50, 4))
    edges = hopf_map(comp)
    assert np.allclose(np.linalg.norm(edges, axis=1),
                       np.sum(comp**2, axis=1), rtol=0, atol=1e-12)


def test_hopf_map_input_forms_agree():
    q = Quaternion(0.3, -0.4, 0.5, 1.2)
    single = hopf_map(q)
    from_list = hopf_map([q, q])
    from_array = hopf_map(np.array([[0.3, -0.4, 0.5, 1.2]]))
    assert np.array_equal(single[0], from_list[0])
    assert np.array_equal(single[0], from_array[0])
    with pytest.raises(InvalidDimensionError):
        hopf_map(np.zeros((2, 3)))


def test_hopf_map_matches_quaternion_product():
    rng = SeedStream(SEED, 2).generator()
    for comp in rng.standard_normal((20, 4)):
        q = Quaternion(*comp)
        prod = q.conjugate() * Quaternion(0, 1, 0, 0) * q
        assert abs(prod.w) < 1e-12
        assert np.allclose(hopf_map(q)[0], [prod.x, prod.y, prod.z],
                           rtol=0, atol=1e-12)


def test_quaternion_algebra():
    i = Quaternion(0, 1, 0, 0)
    j = Quaternion(0, 0, 1, 0)
    k = Quaternion(0, 0, 0, 1)
    assert i * j == k
    assert j * i == Quaternion(0, 0, 0, -1)
    rng = SeedStream(SEED, 3).generator()
    for _ in range(20):
        p, q, r = (Quaternion(*c) for c in rng.standard_normal((3, 4)))
        left = ((p * q) * r).as_array()
        right = (p * (q * r)).as_array()
        assert np.allclose(left, right, rtol=1e-12, atol=1e-12)
        assert abs((p * q).norm() - p.norm() * q.norm()) < 1e-12


def test_quaternion_from_complex_pair():
    q = Quaternion.from_complex_pair(1 + 2j, 3 + 4j)
    assert (q.w, q.x, q.y, q.z) == (1.0, 2.0, 3.0, 4.0)


def test_sample_arm_perimeter():
    rng = SeedStream(SEED, 4).generator()
    for dim in (2, 3):
        for _ in range(20):
            p = sample_arm(dim, 10, rng)
            assert not p.closed
            assert p.edges.shape == (10, dim)
            assert abs(perimeter(p) - 2.0) < 1e-12


def test_sample_pol_closure_and_perimeter():
    rng = SeedStream(SEED, 5).generator()
    for dim in (2, 3):
        for _ in range(20):
            p = sample_pol(dim, 50, rng)
            assert p.closed
            assert closure_residual(p) <= 1e-10
            assert abs(perimeter(p) - 2.0) < 1e-10


def test_sampler_size_validation():
    s = SeedStream(SEED, 0)
    with pytest.raises(InvalidSizeError):
        sample_arm(2, 2, s)
    with pytest.raises(InvalidSizeError):
        sample_pol(3, 1, s)
    with pytest.raises(InvalidDimensionError):
        sample_arm(4, 10, s)


def test_space_dim():
    assert space_dim("arm2") == 2
    assert space_dim("pol2") == 2
    assert space_dim("arm3") == 3
    assert space_dim("pol3") == 3
    with pytest.raises(InvalidDimensionError):
        space_dim("arm4")


def test_arm2_edge_length_law():
    # |e_1|/2 = |z_1|^2/2 with z uniform on the radius-sqrt(2) sphere in C^n,
    # which is Beta(1, n-1) by the classical sphere-coordinate law.
    n = 10
    edges = space_edges_batch(SeedStream(SEED, 6).generator(), 100_000,
                              "arm2", n)
    half_lengths = np.linalg.norm(edges[:, 0, :], axis=1) / 2.0
    assert ks_distance(half_lengths, stats.beta(1, n - 1).cdf) < 0.01


def test_arm3_edge_length_law():
    # |e_1|/2 = |q_1|^2/2 sums four squared sphere coordinates in R^(4n),
    # giving Beta(2, 2n-2).
    n = 5
    edges = space_edges_batch(SeedStream(SEED, 7).generator(), 100_000,
                              "arm3", n)
    half_lengths = np.linalg.norm(edges[:, 0, :], axis=1) / 2.0
    assert ks_distance(half_lengths, stats.beta(2, 2 * n - 2).cdf) < 0.01


def test_pol2_mean_edge_lengths_uniform_over_slots():
    # Every edge slot has mean length 2/n (the slots are exchangeable).
    n = 50
    edges = space_edges_batch(SeedStream(SEED, 8).generator(), 20_000,
                              "pol2", n)
    lengths = np.linalg.norm(edges, axis=2)
    se = lengths.std(axis=0, ddof=1) / math.sqrt(lengths.shape[0])
    gaps = np.abs(lengths.mean(axis=0) - 2.0 / n)
    assert np.all(gaps < 4 * se)


def test_pol2_edge_direction_uniform():
    # arg(e_1) should be uniform on (-pi, pi]: chi-square over 36 bins.
    edges = space_edges_batch(SeedStream(SEED, 9).generator(), 100_000,
                              "pol2", 20)
    angles = np.arctan2(edges[:, 0, 1], edges[:, 0, 0])
    counts, _ = np.histogram(angles, bins=36, range=(-math.pi, math.pi))
    expected = angles.size / 36
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < stats.chi2.ppf(0.999, 35)


def test_arm3_direction_projection_moment():
    # E[(e_hat . u)^2] = 1/3 for a uniform direction and any fixed unit u.
    edges = space_edges_batch(SeedStream(SEED, 10).generator(), 20_000,
                              "arm3", 10)
    unit = edges[:, 0, :] / np.linalg.norm(edges[:, 0, :], axis=1)[:, None]
    proj_sq = unit[:, 2] ** 2
    se = proj_sq.std(ddof=1) / math.sqrt(proj_sq.size)
    assert abs(proj_sq.mean() - 1.0 / 3.0) < 4 * se


def test_perimeter_closure_vertices_square():
    p = Polygon(dim=2, closed=True,
                edges=[[1, 0], [0, 1], [-1, 0], [0, -1]])
    assert perimeter(p) == 4.0
    assert closure_residual(p) == 0.0
    assert np.array_equal(vertices(p),
                          [[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]])


def test_open_chain_closure_residual():
    p = Polygon(dim=2, closed=False, edges=[[1, 0], [0, 1]])
    assert abs(closure_residual(p) - math.sqrt(2.0)) < 1e-15
    assert np.array_equal(vertices(p), [[0, 0], [1, 0], [1, 1]])


def test_segment_slices_and_validates():
    p = Polygon(dim=2, closed=False, edges=[[1, 0], [0, 1], [2, 3]])
    assert np.array_equal(segment(p, 1), [1, 0])
    assert np.array_equal(segment(p, 2), [1, 0, 0, 1])
    assert np.array_equal(segment(p, 3), [1, 0, 0, 1, 2, 3])
    with pytest.raises(InvalidSizeError):
        segment(p, 0)
    with pytest.raises(InvalidSizeError):
        segment(p, 4)


def test_segment_returns_copy():
    p = Polygon(dim=2, closed=False, edges=[[1, 0], [0, 1]])
    s = segment(p, 1)
    s[0] = 99.0
    assert p.edges[0, 0] == 1.0


def test_polygon_validation():
    with pytest.raises(InvalidDimensionError):
        Polygon(dim=4, closed=False, edges=np.zeros((3, 4)))
    with pytest.raises(InvalidDimensionError):
        Polygon(dim=2, closed=False, edges=np.zeros((3, 3)))
    with pytest.raises(InvalidSizeError):
        Polygon(dim=2, closed=False, edges=np.zeros((0, 2)))
