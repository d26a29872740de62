"""Marginal families, concentration certificates, Prokhorov mass bounds,
and the end-to-end scenario pipeline."""

from __future__ import annotations

import numpy as np
import pytest

from momentkit import (
    AlgebraElement,
    DiscreteMeasure,
    GramForm,
    MeasureFamily,
    QuadraticModuleSpec,
    SubalgebraIndex,
    concentration_check,
    concentration_equivalence_check,
    consistency_check,
    dual_norm,
    full_lattice,
    orthonormal_cap_check,
    prokhorov_mass_check,
    pushforward,
    reverse_seminorm_construction,
    trace_value,
    verify_main_theorem_scenario,
    whitening_system,
)
from momentkit.concentration import exact_tail, restrict_form
from momentkit.errors import (
    HypothesisNotCertified,
    KernelIssue,
    NotInScope,
    NotSubset,
)
from momentkit.forms import DualFunctional
from momentkit.symalg import Character


def two_atom():
    return DiscreteMeasure(
        dim=2,
        atoms=np.array([[1.0, 2.0], [-1.0, 0.0]]),
        weights=np.array([0.5, 0.5]),
    )


def test_subalgebra_index_ordering():
    s = SubalgebraIndex(coords=(0,))
    t = SubalgebraIndex(coords=(0, 1))
    assert s.is_subset(t)
    assert not t.is_subset(s)
    assert s.positions_in(t) == [0]
    with pytest.raises(NotSubset):
        t.positions_in(s)


def test_full_lattice_size_and_cap():
    assert len(full_lattice(3)) == 7
    with pytest.raises(NotInScope):
        full_lattice(13)


def test_pushforward_projection_and_merge():
    nu = two_atom()
    s = SubalgebraIndex(coords=(0,))
    t = SubalgebraIndex(coords=(0, 1))
    proj = pushforward(nu, s, t)
    assert sorted(proj.atoms.ravel().tolist()) == [-1.0, 1.0]
    # equal projections merge by weight addition
    nu2 = DiscreteMeasure(
        dim=2,
        atoms=np.array([[1.0, 2.0], [1.0, 3.0]]),
        weights=np.array([0.5, 0.5]),
    )
    merged = pushforward(nu2, s, t)
    assert merged.atoms.shape == (1, 1)
    assert merged.weights[0] == pytest.approx(1.0)


def test_family_from_global_consistent():
    fam = MeasureFamily.from_global(two_atom())
    assert len(fam.indices()) == 3
    assert consistency_check(fam)


def test_consistency_detects_perturbation():
    fam = MeasureFamily.from_global(two_atom())
    s = SubalgebraIndex(coords=(0,))
    bad = dict(fam.entries)
    nu = bad[s]
    bad[s] = DiscreteMeasure(
        dim=1, atoms=nu.atoms, weights=np.array([0.5 + 1e-3, 0.5 - 1e-3])
    )
    assert not consistency_check(MeasureFamily(entries=bad))


def test_exact_tail_weight_sums():
    nu = two_atom()
    # functional a = (1, 0): values 1 and -1, |.| >= 1 both -> tail 1
    assert exact_tail(nu, np.array([1.0, 0.0])) == pytest.approx(1.0)
    assert exact_tail(nu, np.array([0.4, 0.0])) == pytest.approx(0.0)
    assert exact_tail(nu, np.array([0.0, 0.5])) == pytest.approx(0.5)


def test_concentration_certificate_exact_threshold():
    """p equal to the global second-moment form: the whitened eigenvalue is
    exactly 1, so the certificate at epsilon = delta^2 needs the equality
    slack."""
    fam = MeasureFamily.from_global(two_atom())
    p = GramForm(dim=2, gram=np.array([[1.0, 1.0], [1.0, 2.0]]))
    rep = concentration_check(fam, p, epsilon=0.04, delta=0.2)
    assert rep.certified
    assert rep.details["worst_sup"] == pytest.approx(0.04, rel=1e-12)
    tight = concentration_check(fam, p, epsilon=0.0399, delta=0.2)
    assert not tight.certified


def test_concentration_delta_origin_always_certified():
    nu = DiscreteMeasure(
        dim=2, atoms=np.zeros((1, 2)), weights=np.array([1.0])
    )
    fam = MeasureFamily.from_global(nu)
    p = GramForm(dim=2, gram=np.eye(2))
    for eps, delta in [(1e-6, 1e-3), (0.5, 10.0)]:
        assert concentration_check(fam, p, eps, delta).certified


def test_concentration_kernel_escape_raises():
    nu = DiscreteMeasure(
        dim=2,
        atoms=np.array([[0.0, 5.0], [0.0, -5.0]]),
        weights=np.array([0.5, 0.5]),
    )
    fam = MeasureFamily.from_global(nu)
    p = GramForm(dim=2, gram=np.diag([1.0, 0.0]))
    with pytest.raises(KernelIssue):
        concentration_check(fam, p, epsilon=0.1, delta=0.1)


def test_concentration_equivalence_modes():
    fam = MeasureFamily.from_global(two_atom())
    p = GramForm(dim=2, gram=np.array([[1.0, 1.0], [1.0, 2.0]]))
    grid = [(0.04, 0.2), (0.25, 0.5)]
    assert concentration_equivalence_check(
        fam, p, grid, rng=np.random.default_rng(0)
    )
    assert concentration_equivalence_check(fam, p, [], rng=None)  # vacuous


def test_equivalence_kernel_branch():
    """An atom family supported where p vanishes: nu(|alpha(a)| = 0) = 1 for
    p-null directions a, the branch the proposition handles separately."""
    nu = DiscreteMeasure(
        dim=2,
        atoms=np.array([[2.0, 0.0], [-2.0, 0.0]]),
        weights=np.array([0.5, 0.5]),
    )
    fam = MeasureFamily.from_global(nu)
    p = GramForm(dim=2, gram=np.diag([4.0, 1.0]))
    # atoms vanish on coordinate 2; p has no kernel so nothing leaks
    assert concentration_equivalence_check(
        fam, p, [(0.5, 0.3)], rng=np.random.default_rng(1)
    )


def test_prokhorov_mass_and_nesting():
    fam = MeasureFamily.from_global(two_atom())
    p = GramForm(dim=2, gram=np.array([[1.0, 1.0], [1.0, 2.0]]))
    q = GramForm(dim=2, gram=np.eye(2))
    rep = prokhorov_mass_check(fam, p, q, epsilon=0.04, delta=0.2)
    assert rep.mass_ok
    assert all(m >= 1 - 14 * 0.04 - 1e-12 for m in rep.masses.values())
    assert rep.nesting_ok
    assert rep.trace_identity_ok


def test_prokhorov_requires_certificate():
    fam = MeasureFamily.from_global(two_atom())
    p = GramForm(dim=2, gram=np.array([[1.0, 1.0], [1.0, 2.0]]))
    q = GramForm(dim=2, gram=np.eye(2))
    with pytest.raises(HypothesisNotCertified):
        prokhorov_mass_check(fam, p, q, epsilon=0.001, delta=0.2)


def test_prokhorov_trace_identity_exact():
    """tr(p / delta r_eps) = eps exactly when tr(p/q) > 0."""
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        a = rng.standard_normal((n, n))
        p = GramForm(dim=n, gram=a @ a.T + 0.2 * np.eye(n))
        b = rng.standard_normal((n, n))
        q = GramForm(dim=n, gram=b @ b.T + 0.2 * np.eye(n))
        eps = float(rng.uniform(0.01, 0.5))
        delta = float(rng.uniform(0.1, 1.0))
        tr = trace_value(p, q)
        c = np.sqrt(tr) / (delta * np.sqrt(eps))
        scaled = GramForm(dim=n, gram=(delta * c) ** 2 * np.asarray(q.gram))
        assert trace_value(p, scaled) == pytest.approx(eps, rel=1e-10)


def test_orthonormal_cap():
    q = GramForm(dim=3, gram=np.eye(3))
    e_sys = whitening_system(q)
    rng = np.random.default_rng(8)
    for n in (1, 2, 4):
        # alpha inside the dual ball of radius n
        point = rng.standard_normal(3)
        point = point / np.linalg.norm(point) * (0.9 * n)
        assert orthonormal_cap_check(q, e_sys, n, Character(point=point))
    # Parseval equality at dual norm exactly n
    point = np.array([2.0, 0.0, 0.0])
    assert orthonormal_cap_check(q, e_sys, 2, Character(point=point))


def test_reverse_seminorm_trace_bound():
    rng = np.random.default_rng(9)
    q = GramForm(dim=3, gram=np.eye(3))
    for _ in range(5):
        k = int(rng.integers(1, 5))
        atoms = rng.uniform(-2.0, 2.0, size=(k, 3))
        w = rng.uniform(0.1, 1.0, k)
        nu = DiscreteMeasure(dim=3, atoms=atoms, weights=w / w.sum())
        p = reverse_seminorm_construction(nu, q)
        tr = trace_value(p, q)
        assert tr <= 2.0 + 1e-9
    # measure inside K_1: trace equals sum n^-4 * second moments <= sum n^-2
    nu = DiscreteMeasure(
        dim=3, atoms=0.3 * np.eye(3), weights=np.ones(3) / 3.0
    )
    p = reverse_seminorm_construction(nu, q)
    assert trace_value(p, q) < 2.0


def test_restrict_form_matches_submatrix():
    p = GramForm(dim=3, gram=np.diag([1.0, 2.0, 3.0]))
    s = SubalgebraIndex(coords=(0, 2))
    r = restrict_form(p, s)
    assert np.allclose(r.gram, np.diag([1.0, 3.0]))


def test_main_theorem_pipeline_all_stages():
    g = AlgebraElement(2, 4, {(0, 0): 9.0, (2, 0): -1.0, (0, 2): -1.0})
    report = verify_main_theorem_scenario(
        two_atom(),
        GramForm(dim=2, gram=np.eye(2)),
        QuadraticModuleSpec(generators=(g,)),
        degrees=4,
        eps_grid=[0.04, 0.25],
    )
    assert report.overall_pass
    names = [s.name for s in report.stages]
    assert names == [
        "moment_functional",
        "s_L_degree_one_form",
        "trace_s_L_over_q",
        "marginal_family",
        "consistency",
        "concentration_sqrt_eps",
        "prokhorov_mass",
        "support_continuity_and_kq",
        "representation_identity",
    ]
    tr_stage = report.stages[2]
    assert tr_stage.data["trace"] == pytest.approx(3.0, abs=1e-12)


def test_main_theorem_flags_kq_violation():
    g = AlgebraElement(2, 4, {(1, 0): 1.0})  # x1 >= 0 excludes (-1, 0)
    report = verify_main_theorem_scenario(
        two_atom(),
        GramForm(dim=2, gram=np.eye(2)),
        QuadraticModuleSpec(generators=(g,)),
        degrees=4,
        eps_grid=[0.04],
    )
    assert not report.overall_pass
    failed = {s.name: s for s in report.stages if s.status == "fail"}
    assert "support_continuity_and_kq" in failed
    assert failed["support_continuity_and_kq"].data["kq_violations"] == [1]


def test_main_theorem_origin_trivial():
    nu = DiscreteMeasure(dim=2, atoms=np.zeros((1, 2)), weights=np.array([1.0]))
    report = verify_main_theorem_scenario(
        nu,
        GramForm(dim=2, gram=np.eye(2)),
        QuadraticModuleSpec(generators=()),
        degrees=4,
        eps_grid=[0.1],
    )
    assert report.overall_pass
    assert report.stages[2].data["trace"] == pytest.approx(0.0, abs=1e-15)
