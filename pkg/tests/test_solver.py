"""Atomic measure recovery: Hankel quadrature and flat-extension extraction."""

from __future__ import annotations

import numpy as np
import pytest

from momentkit import (
    DiscreteMeasure,
    from_measure,
    solve_multivariate,
    solve_univariate,
)
from momentkit.errors import NotPSD, RankNotFlat
from momentkit.moments import monomials_up_to


def test_univariate_two_point():
    res = solve_univariate([1.0, 0.0, 1.0, 0.0, 1.0])
    atoms = sorted(res.measure.atoms.ravel().tolist())
    assert atoms == pytest.approx([-1.0, 1.0], abs=1e-10)
    assert res.measure.weights == pytest.approx([0.5, 0.5], abs=1e-10)
    assert res.residual < 1e-10


def test_univariate_three_point():
    res = solve_univariate([1.0, 0.0, 1.0, 0.0, 3.0, 0.0])
    atoms = sorted(res.measure.atoms.ravel().tolist())
    s3 = np.sqrt(3.0)
    assert atoms == pytest.approx([-s3, 0.0, s3], abs=1e-10)
    order = np.argsort(res.measure.atoms.ravel())
    w = res.measure.weights[order]
    assert w == pytest.approx([1 / 6, 2 / 3, 1 / 6], abs=1e-10)
    assert res.residual < 1e-10


def test_univariate_single_atom():
    c = 1.7
    res = solve_univariate([1.0, c, c**2, c**3, c**4])
    assert res.measure.atoms.ravel() == pytest.approx([c], abs=1e-10)
    assert res.measure.weights == pytest.approx([1.0], abs=1e-10)


def test_univariate_not_psd():
    with pytest.raises(NotPSD):
        solve_univariate([1.0, 0.0, -1.0])


def test_univariate_rank_not_flat():
    # full-rank Hankel with no m_{2d+1}: Gaussian moments 1,0,1,0,3 need
    # the odd continuation to build the order-3 recurrence
    with pytest.raises(RankNotFlat):
        solve_univariate([1.0, 0.0, 1.0, 0.0, 3.0])


def test_univariate_gaussian_quadrature_moments():
    """Moments of N(0,1) to degree 6 with the odd continuation recover the
    3-point Gauss-Hermite rule."""
    res = solve_univariate([1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0])
    atoms = sorted(res.measure.atoms.ravel().tolist())
    assert len(atoms) == 4
    assert res.residual < 1e-8


def test_multivariate_two_atom_fixture():
    nu = DiscreteMeasure(
        dim=2,
        atoms=np.array([[1.0, 2.0], [-1.0, 0.0]]),
        weights=np.array([0.5, 0.5]),
    )
    L = from_measure(nu, 4)
    res = solve_multivariate(L, 2)
    assert res.measure.atoms.shape == (2, 2)
    got = sorted(map(tuple, res.measure.atoms.tolist()))
    want = sorted(map(tuple, nu.atoms.tolist()))
    assert np.allclose(got, want, atol=1e-8)
    assert res.residual < 1e-8
    assert res.rank_profile == (2, 2)


def test_multivariate_single_origin_atom():
    nu = DiscreteMeasure(dim=2, atoms=np.zeros((1, 2)), weights=np.array([1.0]))
    res = solve_multivariate(from_measure(nu, 4), 2)
    assert res.measure.atoms == pytest.approx(np.zeros((1, 2)), abs=1e-9)
    assert res.measure.weights == pytest.approx([1.0])


def test_multivariate_product_measure():
    """Four product atoms need order 3: rank M_1 = 3 < rank M_2 = 4, so the
    order-2 truncation is reported non-flat rather than guessed."""
    pts = np.array([[sx, sy] for sx in (-1.0, 1.0) for sy in (-1.0, 1.0)])
    nu = DiscreteMeasure(dim=2, atoms=pts, weights=np.full(4, 0.25))
    with pytest.raises(RankNotFlat):
        solve_multivariate(from_measure(nu, 4), 2)
    res = solve_multivariate(from_measure(nu, 6), 3)
    assert res.measure.atoms.shape == (4, 2)
    got = sorted(map(tuple, np.round(res.measure.atoms, 8).tolist()))
    want = sorted(map(tuple, pts.tolist()))
    assert np.allclose(got, want, atol=1e-8)
    assert res.measure.weights == pytest.approx(np.full(4, 0.25), abs=1e-8)


def test_multivariate_seed_independent():
    nu = DiscreteMeasure(
        dim=3,
        atoms=np.array([[0.5, -0.2, 1.0], [1.5, 0.3, -0.7], [-0.9, 1.1, 0.4]]),
        weights=np.array([0.3, 0.4, 0.3]),
    )
    L = from_measure(nu, 4)
    r1 = solve_multivariate(L, 2, seed=0)
    r2 = solve_multivariate(L, 2, seed=12345)
    assert np.allclose(r1.measure.atoms, r2.measure.atoms, atol=1e-7)
    assert np.allclose(r1.measure.weights, r2.measure.weights, atol=1e-7)


def test_round_trip_random_measures():
    rng = np.random.default_rng(20)
    done = 0
    while done < 15:
        n = int(rng.integers(1, 4))
        k = int(rng.integers(1, 7))
        atoms = rng.uniform(-1.5, 1.5, size=(k, n))
        # enforce pairwise separation >= 0.1
        ok = True
        for i in range(k):
            for j in range(i + 1, k):
                if np.linalg.norm(atoms[i] - atoms[j]) < 0.1:
                    ok = False
        if not ok:
            continue
        w = rng.uniform(0.1, 1.0, k)
        nu = DiscreteMeasure(dim=n, atoms=atoms, weights=w / w.sum())
        d = 3 if k > 3 else 2
        L = from_measure(nu, 2 * d)
        try:
            res = solve_multivariate(L, d)
        except RankNotFlat:
            continue  # truncation genuinely not flat at this degree
        back = from_measure(res.measure, 2 * d)
        for alpha in monomials_up_to(n, 2 * d):
            assert back.moment(alpha) == pytest.approx(
                L.moment(alpha), abs=1e-8
            )
        done += 1


def test_solver_result_serialization():
    res = solve_univariate([1.0, 0.0, 1.0, 0.0, 1.0])
    data = res.to_jsonable()
    assert set(data) == {"atoms", "weights", "residual", "rank_profile"}
    assert len(data["atoms"]) == 2
