"""Concentration of measure families over coordinate subalgebras.

A family assigns to each coordinate subset S a discrete measure on R^|S|
(the marginal picture of a projective system).  All probabilities are exact
weight sums; concentration over the delta-ball is certified through the
exact Chebyshev eigenvalue criterion and independently probed by sampling.
The module ends in a nine-stage verification pipeline combining moment
functionals, concentration certificates and Prokhorov-type mass bounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DimensionMismatch,
    HypothesisNotCertified,
    KernelIssue,
    MomentkitError,
    NotInScope,
    NotSubset,
)
from .forms import (
    DualFunctional,
    GramForm,
    OrthonormalSystem,
    dual_norm,
    is_infinite,
    kernel_basis,
    whitening_system,
)
from .moments import (
    DiscreteMeasure,
    MomentFunctional,
    QuadraticModuleSpec,
    from_measure,
    monomials_up_to,
)
from .symalg import Character
from .traces import trace_value


# ---------------------------------------------------------------------------
# Index lattice and families
# ---------------------------------------------------------------------------

_LATTICE_CAP = 12


@dataclass(frozen=True, order=True)
class SubalgebraIndex:
    """Sorted tuple of coordinate indices (0-based) naming the subalgebra
    generated by those coordinates."""

    coords: tuple

    def __post_init__(self):
        c = tuple(sorted(int(i) for i in self.coords))
        if len(set(c)) != len(c) or (c and c[0] < 0):
            raise DimensionMismatch(f"bad coordinate subset {self.coords}")
        object.__setattr__(self, "coords", c)

    def __len__(self):
        return len(self.coords)

    def is_subset(self, other: "SubalgebraIndex") -> bool:
        return set(self.coords) <= set(other.coords)

    def positions_in(self, other: "SubalgebraIndex") -> list[int]:
        if not self.is_subset(other):
            raise NotSubset(f"{self.coords} not within {other.coords}")
        return [other.coords.index(i) for i in self.coords]


def full_lattice(n: int) -> list[SubalgebraIndex]:
    """All 2^n - 1 nonempty coordinate subsets, ordered by size then lex."""
    if n > _LATTICE_CAP:
        raise NotInScope(f"full lattice capped at n = {_LATTICE_CAP}, got {n}")
    out = []
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            out.append(SubalgebraIndex(coords=combo))
    return out


def pushforward(
    nu: DiscreteMeasure, s: SubalgebraIndex, t: SubalgebraIndex
) -> DiscreteMeasure:
    """Marginal of a measure over T on the sub-coordinates S: project atoms
    and merge exactly coinciding images by weight addition."""
    if nu.dim != len(t):
        raise DimensionMismatch(f"measure dim {nu.dim} != |T| = {len(t)}")
    pos = s.positions_in(t)
    merged: dict = {}
    for atom, w in zip(nu.atoms, nu.weights):
        key = tuple(atom[pos])
        merged[key] = merged.get(key, 0.0) + w
    atoms = np.array(list(merged.keys()), dtype=float).reshape(len(merged), len(s))
    weights = np.array(list(merged.values()))
    return DiscreteMeasure(dim=len(s), atoms=atoms, weights=weights)


@dataclass(frozen=True, eq=False)
class MeasureFamily:
    """Finite map SubalgebraIndex -> DiscreteMeasure over those coordinates."""

    entries: dict

    def __post_init__(self):
        for idx, nu in self.entries.items():
            if nu.dim != len(idx):
                raise DimensionMismatch(
                    f"entry {idx.coords} has measure dim {nu.dim}"
                )

    def indices(self) -> list[SubalgebraIndex]:
        return sorted(self.entries, key=lambda s: (len(s), s.coords))

    @classmethod
    def from_global(cls, nu: DiscreteMeasure, lattice=None) -> "MeasureFamily":
        """Marginals of one global measure over a lattice (default: full)."""
        if lattice is None:
            lattice = full_lattice(nu.dim)
        top = SubalgebraIndex(coords=tuple(range(nu.dim)))
        entries = {s: pushforward(nu, s, top) for s in lattice}
        return cls(entries=entries)


def consistency_check(fam: MeasureFamily, degree: int = 4, tol: float = 1e-10) -> bool:
    """For every pair S within T present in the family, the pushforward of
    nu_T to S must match nu_S in all moments up to ``degree`` (moment
    comparison avoids atom-matching ambiguity)."""
    idxs = fam.indices()
    for s in idxs:
        for t in idxs:
            if s is t or not s.is_subset(t):
                continue
            pushed = pushforward(fam.entries[t], s, t)
            for alpha in monomials_up_to(len(s), degree):
                if abs(pushed.moment(alpha) - fam.entries[s].moment(alpha)) > tol:
                    return False
    return True


# ---------------------------------------------------------------------------
# Concentration certificates
# ---------------------------------------------------------------------------


class ConcentrationMode(Enum):
    EPS_DELTA = "eps_delta"
    EPS_GAMMA = "eps_gamma"


@dataclass(frozen=True, eq=False)
class ConcentrationReport:
    mode: ConcentrationMode
    certified_pairs: tuple
    exact: bool
    details: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return len(self.certified_pairs) > 0

    def to_jsonable(self) -> dict:
        return {
            "mode": self.mode.value,
            "certified_pairs": [list(map(float, p)) for p in self.certified_pairs],
            "exact": self.exact,
            "details": _jsonable_details(self.details),
        }


def _jsonable_details(d):
    out = {}
    for k, v in d.items():
        key = ",".join(str(i) for i in k.coords) if isinstance(k, SubalgebraIndex) else str(k)
        out[key] = v
    return out


def restrict_form(p: GramForm, s: SubalgebraIndex) -> GramForm:
    """Principal submatrix of the Gram on the S coordinates."""
    idx = np.asarray(s.coords, dtype=int)
    return GramForm(dim=len(idx), gram=p.gram[np.ix_(idx, idx)], psd_tol=p.psd_tol)


def _second_moment(nu: DiscreteMeasure) -> np.ndarray:
    return np.einsum("j,ji,jk->ik", nu.weights, nu.atoms, nu.atoms)


def _kernel_leak_check(p_s: GramForm, nu: DiscreteMeasure, tol: float = 1e-10):
    """Raise KernelIssue when a supported atom evaluates nonzero on a
    p_S-kernel direction (concentrated families must vanish there)."""
    ker = kernel_basis(p_s)
    if not ker:
        return
    scale = max(1.0, float(np.abs(nu.support).max(initial=0.0)))
    for b in ker:
        vals = nu.support @ b
        if vals.size and np.abs(vals).max() > tol * scale:
            raise KernelIssue(
                f"supported character is nonzero on a kernel direction of p|_S"
            )


def exact_tail(nu: DiscreteMeasure, a: np.ndarray, threshold: float = 1.0) -> float:
    """nu({alpha : |alpha(a)| >= threshold}) as an exact weight sum."""
    vals = np.abs(nu.atoms @ a)
    return float(nu.weights[vals >= threshold].sum())


def concentration_check(
    fam: MeasureFamily,
    p: GramForm,
    epsilon: float,
    delta: float,
    probe_budget: int = 16,
    rng=None,
    cert_slack: float = 1e-9,
) -> ConcentrationReport:
    """Exact sufficient certificate per index S:

        sup_{p(a) <= delta, a in S} (nu_S-second moment of hat a)
            = delta^2 lambda_max(second-moment matrix whitened by p|_S)

    certified when that sup is at most epsilon for every S (Chebyshev then
    bounds every tail nu_S(|alpha(a)| >= 1) by epsilon).  Additionally
    probes random degree-1 elements on the delta-sphere with exact tail
    weights as falsification attempts.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    details: dict = {}
    worst = 0.0
    for s in fam.indices():
        nu = fam.entries[s]
        p_s = restrict_form(p, s)
        _kernel_leak_check(p_s, nu)
        m = _second_moment(nu)
        w = whitening_system(p_s).matrix
        if w.size:
            lam = float(max(np.linalg.eigvalsh(w.T @ m @ w)[-1], 0.0))
        else:
            lam = 0.0
        sup = delta**2 * lam
        probes = []
        for _ in range(probe_budget if len(s) > 0 and p_s.rank > 0 else 0):
            u = rng.standard_normal(len(s))
            nrm = p_s(u)
            if nrm <= 0:
                continue
            a = (delta / nrm) * u
            probes.append(exact_tail(nu, a))
        details[s] = {
            "sup": sup,
            "probe_tails": probes,
            "max_probe_tail": max(probes, default=0.0),
        }
        worst = max(worst, sup)
    certified = worst <= epsilon * (1.0 + cert_slack) + 1e-15
    falsified = any(
        t > epsilon * (1.0 + cert_slack) + 1e-15
        for d in details.values()
        for t in d["probe_tails"]
    )
    pairs = ((epsilon, delta),) if certified and not falsified else ()
    details["worst_sup"] = worst
    return ConcentrationReport(
        mode=ConcentrationMode.EPS_DELTA,
        certified_pairs=pairs,
        exact=True,
        details=details,
    )


def concentration_equivalence_check(
    fam: MeasureFamily,
    p: GramForm,
    grid,
    probe_budget: int = 16,
    rng=None,
) -> bool:
    """On each (epsilon, delta) grid point where the eps-delta certificate
    holds, verify the eps-gamma formulation with gamma = 1/delta' for
    delta' = delta/2 (strictly inside), and the converse at delta'' < 1/gamma.
    Checks are exact tail sums on random probes, with the p(a) = 0 branch
    handled through the vanish-on-kernel property.
    """
    if rng is None:
        rng = np.random.default_rng(1)
    for epsilon, delta in grid:
        rep = concentration_check(fam, p, epsilon, delta, probe_budget=0)
        if not rep.certified:
            continue
        delta_prime = delta / 2.0
        gamma = 1.0 / delta_prime
        for s in fam.indices():
            nu = fam.entries[s]
            p_s = restrict_form(p, s)
            for _ in range(probe_budget):
                a = rng.standard_normal(len(s))
                pa = p_s(a)
                if pa > 0:
                    # forward: nu(|alpha(a)| > gamma p(a)) <= epsilon
                    tail = float(
                        nu.weights[np.abs(nu.atoms @ a) > gamma * pa].sum()
                    )
                    if tail > epsilon + 1e-12:
                        return False
                else:
                    # kernel branch: all mass at alpha(a) = 0
                    if exact_tail(nu, a, threshold=1e-9) > 1e-12:
                        return False
            # converse: eps-gamma at gamma implies eps-delta at delta'' < 1/gamma
            delta_dd = 0.9 / gamma
            for _ in range(probe_budget):
                u = rng.standard_normal(len(s))
                nrm = p_s(u)
                if nrm <= 0:
                    continue
                a = (delta_dd / nrm) * u
                if exact_tail(nu, a) > epsilon + 1e-12:
                    return False
    return True


# ---------------------------------------------------------------------------
# Prokhorov-type compact mass bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProkhorovReport:
    scale: float
    masses: dict
    bound: float
    mass_ok: bool
    nesting_ok: bool
    trace_identity: float
    trace_identity_ok: bool

    def to_jsonable(self) -> dict:
        return {
            "scale": float(self.scale),
            "masses": _jsonable_details(self.masses),
            "bound": float(self.bound),
            "mass_ok": bool(self.mass_ok),
            "nesting_ok": bool(self.nesting_ok),
            "trace_identity": float(self.trace_identity),
            "trace_identity_ok": bool(self.trace_identity_ok),
        }


def prokhorov_mass_check(
    fam: MeasureFamily,
    p: GramForm,
    q: GramForm,
    epsilon: float,
    delta: float,
    require_certificate: bool = True,
) -> ProkhorovReport:
    """With r_eps(v) = q(v) sqrt(tr(p/q)) / (delta sqrt(eps)), each nu_S
    must put mass at least 1 - 14 eps on

        K^(S) = {alpha : |alpha(v)| <= r_eps(v) for all degree-1 v in S},

    tested atom-wise through the r_eps|_S-dual norm.  Also checks nesting
    (projected K^(T) members pass the K^(S) test) and the internal identity
    tr(p / (delta r_eps)) = eps (exact when tr(p/q) > 0)."""
    tr = trace_value(p, q)
    if is_infinite(tr):
        raise HypothesisNotCertified("tr(p/q) is infinite")
    if require_certificate:
        rep = concentration_check(fam, p, epsilon, delta, probe_budget=0)
        if not rep.certified:
            raise HypothesisNotCertified(
                f"concentration not certified at ({epsilon}, {delta})"
            )
    c = np.sqrt(tr) / (delta * np.sqrt(epsilon))
    r_eps = GramForm(dim=q.dim, gram=c**2 * q.gram, psd_tol=q.psd_tol)

    def in_k(atom: np.ndarray, form: GramForm) -> bool:
        nd = dual_norm(form, DualFunctional(dim=form.dim, coeffs=atom))
        return (not is_infinite(nd)) and nd <= 1.0 + 1e-9

    masses: dict = {}
    bound = 1.0 - 14.0 * epsilon
    mass_ok = True
    for s in fam.indices():
        nu = fam.entries[s]
        r_s = restrict_form(r_eps, s)
        mass = float(
            sum(w for atom, w in zip(nu.atoms, nu.weights) if in_k(atom, r_s))
        )
        masses[s] = mass
        if mass < bound - 1e-12:
            mass_ok = False

    nesting_ok = True
    idxs = fam.indices()
    for s in idxs:
        r_s = restrict_form(r_eps, s)
        for t in idxs:
            if s is t or not s.is_subset(t):
                continue
            r_t = restrict_form(r_eps, t)
            pos = s.positions_in(t)
            for atom in fam.entries[t].atoms:
                if in_k(atom, r_t) and not in_k(atom[pos], r_s):
                    nesting_ok = False

    if tr > 0:
        # tr(p / (delta r_eps)) = tr(p/q) / (delta c)^2 = eps exactly
        ident = trace_value(p, GramForm(dim=q.dim, gram=(delta * c) ** 2 * q.gram))
        ident_ok = abs(ident - epsilon) <= 1e-10 * max(epsilon, 1.0)
    else:
        ident = 0.0
        ident_ok = True
    return ProkhorovReport(
        scale=float(c),
        masses=masses,
        bound=bound,
        mass_ok=mass_ok,
        nesting_ok=nesting_ok,
        trace_identity=float(ident),
        trace_identity_ok=ident_ok,
    )


# ---------------------------------------------------------------------------
# Reverse construction and the orthonormal cap
# ---------------------------------------------------------------------------


def orthonormal_cap_check(
    q: GramForm, e_sys: OrthonormalSystem, n: int, alpha: Character, slack: float = 1e-9
) -> bool:
    """For a character whose degree-1 functional has q-dual norm at most n,
    the Bessel bound sum_e alpha(e)^2 <= n^2 over any q-orthonormal system."""
    point = alpha.point
    total = float(sum((point @ e) ** 2 for e in e_sys.vectors))
    return total <= n**2 * (1.0 + slack) + 1e-12


def reverse_seminorm_construction(
    nu: DiscreteMeasure, q: GramForm, n_max: int = 50
) -> GramForm:
    """Builds p(v)^2 = sum_{n=1}^{N} n^{-4} * integral over K_n of hat v^2,
    with K_n the q-dual ball of radius n; the construction guarantees
    tr(p/q) <= sum n^{-2} < 2 (checked internally)."""
    dual_norms = []
    for atom in nu.atoms:
        dual_norms.append(dual_norm(q, DualFunctional(dim=q.dim, coeffs=atom)))
    g = np.zeros((q.dim, q.dim))
    for n in range(1, n_max + 1):
        m_n = np.zeros_like(g)
        for atom, w, nd in zip(nu.atoms, nu.weights, dual_norms):
            if not is_infinite(nd) and nd <= n + 1e-12:
                m_n += w * np.outer(atom, atom)
        g += m_n / n**4
    p = GramForm(dim=q.dim, gram=g, psd_tol=q.psd_tol)
    tr = trace_value(p, q)
    if is_infinite(tr) or tr > 2.0 + 1e-9:
        raise MomentkitError(f"reverse construction trace {tr} violates the bound 2")
    return p


# ---------------------------------------------------------------------------
# Nine-stage verification pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StageResult:
    name: str
    status: str  # pass | fail | skipped
    data: dict

    def to_jsonable(self) -> dict:
        return {"name": self.name, "status": self.status, "data": self.data}


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    stages: tuple

    @property
    def overall_pass(self) -> bool:
        return all(s.status == "pass" for s in self.stages)

    def to_jsonable(self) -> dict:
        return {
            "stages": [s.to_jsonable() for s in self.stages],
            "overall_pass": self.overall_pass,
        }


def verify_main_theorem_scenario(
    mu_target: DiscreteMeasure,
    q: GramForm,
    quad_module: QuadraticModuleSpec,
    degrees: int,
    eps_grid,
    probe_budget: int = 8,
) -> ScenarioReport:
    """End-to-end desk-scale verification: build the moment functional of a
    target measure, its degree-1 seminorm s_L, the marginal family over the
    full coordinate lattice, then check consistency, concentration at
    delta = sqrt(eps), Prokhorov mass bounds, support continuity plus
    nonnegativity-set membership, and the representation identity.  Stage
    failures are recorded and the pipeline continues."""
    stages = []

    def run_stage(name, fn):
        try:
            status, data = fn()
        except MomentkitError as exc:
            status, data = "fail", {"error": f"{type(exc).__name__}: {exc}"}
        stages.append(StageResult(name=name, status=status, data=data))
        return stages[-1]

    state: dict = {}

    def stage_functional():
        state["L"] = from_measure(mu_target, degrees)
        return "pass", {"dim": mu_target.dim, "max_degree": degrees}

    run_stage("moment_functional", stage_functional)

    def stage_s_form():
        m = _second_moment(mu_target)
        state["s_form"] = GramForm(dim=mu_target.dim, gram=m)
        return "pass", {"second_moment": [list(map(float, r)) for r in m]}

    run_stage("s_L_degree_one_form", stage_s_form)

    def stage_trace():
        tr = trace_value(state["s_form"], q)
        if is_infinite(tr):
            return "fail", {"trace": "infinite"}
        state["trace"] = tr
        return "pass", {"trace": float(tr)}

    run_stage("trace_s_L_over_q", stage_trace)

    def stage_family():
        state["family"] = MeasureFamily.from_global(mu_target)
        return "pass", {"indices": len(state["family"].entries)}

    run_stage("marginal_family", stage_family)

    def stage_consistency():
        ok = consistency_check(state["family"], degree=min(degrees, 4))
        return ("pass" if ok else "fail"), {"consistent": ok}

    run_stage("consistency", stage_consistency)

    def stage_concentration():
        results = {}
        all_ok = True
        for eps in eps_grid:
            rep = concentration_check(
                state["family"],
                state["s_form"],
                eps,
                float(np.sqrt(eps)),
                probe_budget=probe_budget,
            )
            results[f"{eps}"] = rep.certified
            all_ok = all_ok and rep.certified
        return ("pass" if all_ok else "fail"), {"certified": results}

    run_stage("concentration_sqrt_eps", stage_concentration)

    def stage_prokhorov():
        results = {}
        all_ok = True
        for eps in eps_grid:
            rep = prokhorov_mass_check(
                state["family"], state["s_form"], q, eps, float(np.sqrt(eps))
            )
            ok = rep.mass_ok and rep.nesting_ok and rep.trace_identity_ok
            results[f"{eps}"] = {
                "mass_ok": rep.mass_ok,
                "nesting_ok": rep.nesting_ok,
                "trace_identity_ok": rep.trace_identity_ok,
            }
            all_ok = all_ok and ok
        return ("pass" if all_ok else "fail"), {"per_eps": results}

    run_stage("prokhorov_mass", stage_prokhorov)

    def stage_support():
        dual_norms = []
        continuous = True
        for atom in mu_target.atoms:
            nd = dual_norm(q, DualFunctional(dim=q.dim, coeffs=atom))
            if is_infinite(nd):
                continuous = False
                dual_norms.append("infinite")
            else:
                dual_norms.append(float(nd))
        violations = [
            i
            for i, atom in enumerate(mu_target.support)
            if not quad_module.contains(atom)
        ]
        ok = continuous and not violations
        return ("pass" if ok else "fail"), {
            "dual_norms": dual_norms,
            "kq_violations": violations,
        }

    run_stage("support_continuity_and_kq", stage_support)

    def stage_representation():
        if "L" not in state:
            return "skipped", {}
        L = state["L"]
        worst = 0.0
        from .symalg import AlgebraElement

        for alpha in monomials_up_to(mu_target.dim, degrees):
            elem = AlgebraElement(mu_target.dim, degrees, {alpha: 1.0})
            worst = max(worst, abs(mu_target.integrate(elem) - L(elem)))
        ok = worst <= 1e-12
        return ("pass" if ok else "fail"), {"max_error": worst}

    run_stage("representation_identity", stage_representation)

    return ScenarioReport(stages=tuple(stages))
