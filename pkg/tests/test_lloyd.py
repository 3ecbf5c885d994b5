import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvequant.closed_forms import hexagon_6k
from curvequant.curves import build_hexagon
from curvequant.lloyd import (
    SolveConfig,
    _BoundarySystem,
    cell_stats,
    distortion_of,
    lloyd,
    lloyd_step,
    refine_canonical,
    seed_points,
    solve,
)
from curvequant.measure import ArcSet, centroid, distortion
from curvequant.quadrature import riemann_midpoint
from curvequant.symmetry import hausdorff, match_up_to_symmetry
from curvequant.voronoi import partition

S3 = math.sqrt(3.0)
CURVE_NAMES = ["hexagon", "semicircle", "ellipse", "arc"]


def centroids_for_boundaries(curve, u_bounds):
    """Generators at the centroids of the arcs between consecutive global parameters."""
    u = list(u_bounds) + [u_bounds[0] + curve.n_segments]
    return np.array([centroid(curve, ArcSet.between(curve, a, b)) for a, b in zip(u[:-1], u[1:])])


def test_one_step_reaches_centroid(builtin_curves):
    for curve in builtin_curves.values():
        q = lloyd_step(curve, [(5.0, -3.0)])
        np.testing.assert_allclose(q[0], centroid(curve, ArcSet.whole(curve)), atol=1e-14)
    q = lloyd_step(build_hexagon(), [(0.0, 0.0)])
    np.testing.assert_allclose(q[0], [0.5, S3 / 2], atol=1e-15)


def test_six_means_fixed_point(hexagon):
    q = np.array([
        (15 / 16, S3 / 16), (11 / 8, S3 / 2), (15 / 16, 15 * S3 / 16),
        (1 / 16, 15 * S3 / 16), (-3 / 8, S3 / 2), (1 / 16, S3 / 16),
    ])
    assert np.abs(lloyd_step(hexagon, q) - q).max() <= 1e-12


@pytest.mark.parametrize("name", CURVE_NAMES)
def test_monotone_descent(builtin_curves, name):
    curve = builtin_curves[name]
    rng = np.random.default_rng(31)
    for n in range(2, 10):
        for q in seed_points(curve, n, 100, rng):
            q = q + rng.normal(scale=0.05, size=q.shape)
            before = distortion_of(curve, q)
            after = distortion_of(curve, lloyd_step(curve, q))
            assert after <= before + 1e-12


def test_empty_cell_is_reseeded(hexagon):
    q = lloyd_step(hexagon, [(0.5, S3 / 2), (40.0, 40.0), (41.0, 40.0)])
    M, _, _ = cell_stats(hexagon, q)
    assert np.all(M > 0)


def test_lloyd_converges_on_hexagon(hexagon):
    q, D, it, ok = lloyd(hexagon, [(1.2, 0.8), (-0.2, 0.9)], 10_000, 1e-13)
    assert ok
    assert D == pytest.approx(71 / 144, abs=1e-9)
    assert it > 1


def test_lloyd_reports_nonconvergence(hexagon):
    _, _, it, ok = lloyd(hexagon, [(0.3, 0.1), (0.4, 0.1), (0.5, 0.1), (0.6, 0.2)], 2, 1e-13)
    assert not ok
    assert it == 2


def test_distortion_of_examples(hexagon):
    assert distortion_of(hexagon, [(1, 1 / S3), (0, 2 / S3)]) == pytest.approx(0.5, abs=1e-15)
    assert distortion_of(hexagon, [(0.5, S3 / 2)]) == pytest.approx(5 / 6, abs=1e-15)


def test_distortion_of_dense_oracle(hexagon):
    q = np.array([(0.5, 0.0), (0.5, S3)])

    def integrand(u):
        x = hexagon.point(u)
        d = ((x[:, None, :] - q[None]) ** 2).sum(-1).min(1)
        return d * hexagon.weight(u)

    oracle = riemann_midpoint(integrand, 0.0, 6.0, 10**6)
    assert abs(distortion_of(hexagon, q) - oracle) < 1e-6


def test_distortion_of_single_generator_is_variance(builtin_curves):
    for curve in builtin_curves.values():
        g = centroid(curve, ArcSet.whole(curve))
        assert distortion_of(curve, [g]) == pytest.approx(
            distortion(curve, ArcSet.whole(curve), g), abs=1e-14
        )


@pytest.mark.parametrize("name", ["hexagon", "semicircle", "ellipse"])
def test_analytic_jacobian_matches_fd(builtin_curves, name):
    curve = builtin_curves[name]
    rng = np.random.default_rng(32)
    checked = 0
    for n in (3, 4, 5, 6, 7):
        q0 = seed_points(curve, n, 1, rng)[0]
        q, *_ = lloyd(curve, q0, 30, 1e-6)
        part = partition(curve, q)
        sysm = _BoundarySystem(curve, part, n)
        b = sysm.b0
        # keep away from segment junctions where the tangent jumps
        if np.any(np.abs(b - np.round(b)) < 1e-3):
            continue
        np.testing.assert_allclose(sysm.jacobian(b), sysm.jacobian_fd(b), rtol=1e-5, atol=1e-6)
        checked += 1
    assert checked >= 2


def test_refine_hexagon_six(hexagon):
    rng = np.random.default_rng(33)
    u = np.arange(6) + 0.5 + rng.uniform(-0.05, 0.05, 6)
    ref = refine_canonical(hexagon, centroids_for_boundaries(hexagon, u))
    assert ref.ok and ref.local_min
    assert ref.residual < 1e-13
    np.testing.assert_allclose(np.mod(ref.boundaries, 1.0), 0.5, atol=1e-10)
    assert hausdorff(ref.quantizer, hexagon_6k(1).points) < 1e-12


def test_refine_hexagon_three(hexagon):
    u = np.array([0.5, 2.5, 4.5]) + np.array([0.02, -0.03, 0.01])
    ref = refine_canonical(hexagon, centroids_for_boundaries(hexagon, u))
    assert ref.ok
    assert ref.residual < 1e-13
    np.testing.assert_allclose(ref.boundaries, [0.5, 2.5, 4.5], atol=1e-10)
    assert distortion_of(hexagon, ref.quantizer) == pytest.approx(199 / 768, abs=1e-15)


def test_refine_flags_saddle(hexagon):
    # reference four-point set: stationary but not a local minimum
    q = [(17 / 24, 1 / (8 * S3)), (31 / 24, 5 * S3 / 8), (7 / 24, 23 / (8 * S3)), (-7 / 24, 3 * S3 / 8)]
    ref = refine_canonical(hexagon, q)
    assert ref.ok and ref.local_min is False
    assert ref.escape is not None
    assert distortion_of(hexagon, ref.escape) < 23 / 144


def test_refine_rejects_empty_cells(hexagon):
    ref = refine_canonical(hexagon, [(0.5, S3 / 2), (50.0, 50.0)])
    assert not ref.ok


@pytest.mark.parametrize("curve_name,n,target", [
    ("hexagon", 2, 71 / 144),
    ("hexagon", 3, 199 / 768),
    ("semicircle", 3, 0.147821),
    ("ellipse", 4, 0.393732),
])
def test_solve_small(builtin_curves, curve_name, n, target):
    curve = builtin_curves[curve_name]
    res = solve(curve, SolveConfig(n, restarts=8))
    assert res.converged
    tol = 1e-9 if curve_name == "hexagon" else 5e-6
    assert abs(res.distortion - target) < tol
    # bookkeeping invariants
    _, _, D = cell_stats(curve, res.quantizer)
    assert abs(res.distortion - D.sum()) <= 1e-12
    assert res.distortion <= min(res.restart_distortions) + 1e-15
    assert len(res.restart_distortions) == 8
    assert np.abs(lloyd_step(curve, res.quantizer) - res.quantizer).max() < 1e-9


def test_solve_hexagon_two_up_to_symmetry(hexagon):
    res = solve(hexagon, SolveConfig(2, restarts=8))
    target = [(13 / 12, S3 / 2), (-1 / 12, S3 / 2)]
    assert match_up_to_symmetry(res.quantizer, target, hexagon) < 1e-9


def test_solve_is_deterministic(ellipse):
    a = solve(ellipse, SolveConfig(5, restarts=4, seed=7))
    b = solve(ellipse, SolveConfig(5, restarts=4, seed=7))
    assert np.array_equal(a.quantizer, b.quantizer)
    assert a.restart_distortions == b.restart_distortions


def test_thread_count_does_not_change_result(semicircle):
    a = solve(semicircle, SolveConfig(4, restarts=4, seed=3, threads=1))
    b = solve(semicircle, SolveConfig(4, restarts=4, seed=3, threads=2))
    assert np.array_equal(a.quantizer, b.quantizer)
    assert a.distortion == b.distortion


def test_unrefined_solve_is_plain_lloyd(hexagon):
    res = solve(hexagon, SolveConfig(3, restarts=2, refine=False))
    assert res.method == "lloyd"
    assert res.distortion == pytest.approx(199 / 768, abs=1e-9)


def test_max_iters_flags_nonconvergence(hexagon):
    res = solve(hexagon, SolveConfig(5, restarts=1, max_iters=1, refine=False))
    assert not res.converged


@pytest.mark.parametrize("kwargs", [dict(n=0), dict(n=2, restarts=0), dict(n=2.5), dict(n=2, max_iters=0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolveConfig(**kwargs)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_scaling_covariance(hexagon, n):
    lam = 2.0
    a = solve(hexagon, SolveConfig(n, restarts=4))
    b = solve(hexagon.scaled(lam), SolveConfig(n, restarts=4))
    assert b.distortion == pytest.approx(lam**2 * a.distortion, rel=1e-12)
    assert match_up_to_symmetry(lam * a.quantizer, b.quantizer, hexagon.scaled(lam)) < 1e-9


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_seed_points_on_curve(n, seed):
    curve = build_hexagon()
    starts = seed_points(curve, n, 3, np.random.default_rng(seed))
    assert len(starts) == 3
    for q in starts:
        assert q.shape == (n, 2)
        # every start lies on the hexagon: inside the bounding box and on some side line
        assert np.all(q[:, 1] >= -1e-12) and np.all(q[:, 1] <= S3 + 1e-12)
